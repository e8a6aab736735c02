#include "depstat/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "depstat/special.hpp"

namespace depstat::models {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::Student: return "student";
        case Family::LogNormalVol: return "lognormal";
        case Family::PseudoElliptical: return "pseudo";
        case Family::Frank: return "frank";
        case Family::Gumbel: return "gumbel";
        case Family::TwoFactorToy: return "toy";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "gaussian") return Family::Gaussian;
    if (name == "student") return Family::Student;
    if (name == "lognormal") return Family::LogNormalVol;
    if (name == "pseudo") return Family::PseudoElliptical;
    if (name == "frank") return Family::Frank;
    if (name == "gumbel") return Family::Gumbel;
    if (name == "toy") return Family::TwoFactorToy;
    throw std::domain_error("unknown model family: " + name);
}

ModelSpec ModelSpec::gaussian() { return ModelSpec{Family::Gaussian}; }

ModelSpec ModelSpec::student(double nu) {
    ModelSpec m{Family::Student};
    m.nu = nu;
    m.validate();
    return m;
}

ModelSpec ModelSpec::lognormal_vol(double s) {
    ModelSpec m{Family::LogNormalVol};
    m.s = s;
    m.validate();
    return m;
}

ModelSpec ModelSpec::pseudo_elliptical(double r, double c, double s) {
    ModelSpec m{Family::PseudoElliptical};
    m.r = r;
    m.c = c;
    m.s = s;
    m.validate();
    return m;
}

ModelSpec ModelSpec::frank(double theta) {
    ModelSpec m{Family::Frank};
    m.theta = theta;
    m.validate();
    return m;
}

ModelSpec ModelSpec::gumbel(double theta) {
    ModelSpec m{Family::Gumbel};
    m.theta = theta;
    m.validate();
    return m;
}

ModelSpec ModelSpec::two_factor_toy(double kappa1, double kappa2) {
    ModelSpec m{Family::TwoFactorToy};
    m.kappa1 = kappa1;
    m.kappa2 = kappa2;
    m.validate();
    return m;
}

void ModelSpec::validate() const {
    switch (family) {
        case Family::Gaussian:
            break;
        case Family::Student:
            if (!(nu > 0.0)) throw std::domain_error("Student: nu must be positive");
            break;
        case Family::LogNormalVol:
            if (!(s >= 0.0)) throw std::domain_error("LogNormalVol: s must be >= 0");
            break;
        case Family::PseudoElliptical:
            if (!(s >= 0.0)) throw std::domain_error("PseudoElliptical: s must be >= 0");
            if (!(std::abs(c) <= 1.0))
                throw std::domain_error("PseudoElliptical: |c| must be <= 1");
            if (!(std::abs(r) <= 1.0))
                throw std::domain_error("PseudoElliptical: |r| must be <= 1");
            break;
        case Family::Frank:
            if (theta == 0.0 || !std::isfinite(theta))
                throw std::domain_error("Frank: theta must be a nonzero real");
            break;
        case Family::Gumbel:
            if (!(theta > 0.0 && theta <= 1.0))
                throw std::domain_error("Gumbel: theta must lie in (0, 1]");
            break;
        case Family::TwoFactorToy:
            if (!std::isfinite(kappa1) || !std::isfinite(kappa2))
                throw std::domain_error("TwoFactorToy: kurtoses must be finite");
            break;
    }
}

MomentRatios moment_ratios(const ModelSpec& model, std::optional<double> c_override) {
    switch (model.family) {
        case Family::Gaussian:
            return {1.0, 1.0};
        case Family::Student: {
            if (!(model.nu > 2.0))
                throw std::domain_error("moment_ratios: Student f1 requires nu > 2");
            const double nu = model.nu;
            const double g = std::exp(std::lgamma(0.5 * nu) - std::lgamma(0.5 * (nu - 1.0)));
            MomentRatios mr;
            mr.f1 = 2.0 / (nu - 2.0) * g * g;
            if (nu > 4.0)
                mr.f2 = (nu - 2.0) / (nu - 4.0);
            else
                mr.f2 = std::nullopt;
            return mr;
        }
        case Family::LogNormalVol: {
            const double s2 = model.s * model.s;
            return {std::exp(s2), std::exp(4.0 * s2)};
        }
        case Family::PseudoElliptical: {
            const double c = c_override.value_or(model.c);
            const double s2c = model.s * model.s * c;
            return {std::exp(s2c), std::exp(4.0 * s2c)};
        }
        default:
            throw std::domain_error("moment_ratios: not a volatility-mixture family");
    }
}

EllipticalPrediction elliptical_predictions(const ModelSpec& model, double rho) {
    if (!model.is_elliptical())
        throw std::domain_error("elliptical_predictions: elliptical family required");
    if (!(std::abs(rho) <= 1.0))
        throw std::domain_error("elliptical_predictions: |rho| must be <= 1");
    const MomentRatios mr = moment_ratios(model);
    EllipticalPrediction out;
    out.zeta1 = (mr.f1 * num::d_func(rho) - 1.0) / (0.5 * kPi * mr.f1 - 1.0);
    if (mr.f2)
        out.zeta2 = (*mr.f2 * (1.0 + 2.0 * rho * rho) - 1.0) / (3.0 * *mr.f2 - 1.0);
    out.cstar = 0.25 + std::asin(rho) / (2.0 * kPi);
    out.rho_sign = 2.0 / kPi * std::asin(rho);
    return out;
}

namespace {

double tail_k1(double nu, double rho) {
    return std::sqrt(nu + 1.0) * std::sqrt(1.0 - rho) / std::sqrt(1.0 + rho);
}

}  // namespace

double student_tail_asymptote(double nu, double rho) {
    if (!(nu > 0.0)) throw std::domain_error("student_tail_asymptote: nu must be positive");
    if (!(std::abs(rho) <= 1.0))
        throw std::domain_error("student_tail_asymptote: |rho| must be <= 1");
    if (rho == -1.0) return 0.0;  // k(1) -> infinity
    if (rho == 1.0) return 1.0;
    return 2.0 - 2.0 * num::student_cdf(tail_k1(nu, rho), nu + 1.0);
}

double student_tail_beta(double nu, double rho) {
    if (!(nu > 0.0)) throw std::domain_error("student_tail_beta: nu must be positive");
    if (!(std::abs(rho) < 1.0))
        throw std::domain_error("student_tail_beta: degenerate at |rho| = 1");
    const double k = tail_k1(nu, rho);
    const double g = std::exp((2.0 / nu) *
                              (std::lgamma(0.5 * nu) + 0.5 * std::log(kPi) -
                               std::lgamma(0.5 * (nu + 1.0))));
    return g * std::pow(nu, 2.0 / nu) / (2.0 / nu + 1.0) * k *
           num::student_pdf(k, nu + 1.0);
}

double student_tail_expansion(double nu, double rho, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("student_tail_expansion: p must lie in (0, 1)");
    return student_tail_asymptote(nu, rho) +
           student_tail_beta(nu, rho) * std::pow(1.0 - p, 2.0 / nu);
}

double archimedean_copula(Family family, double theta, double u, double v) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
        throw std::domain_error("archimedean_copula: u, v must lie in [0, 1]");
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    if (family == Family::Frank) {
        if (theta == 0.0 || !std::isfinite(theta))
            throw std::domain_error("archimedean_copula: Frank theta must be nonzero");
        const double a = std::expm1(theta * u);
        const double b = std::expm1(theta * v);
        const double d = std::expm1(theta);
        return std::log1p(a * b / d) / theta;
    }
    if (family == Family::Gumbel) {
        if (!(theta > 0.0 && theta <= 1.0))
            throw std::domain_error("archimedean_copula: Gumbel theta must lie in (0, 1]");
        const double delta = 1.0 / theta;
        const double t = std::pow(std::pow(-std::log(u), delta) +
                                      std::pow(-std::log(v), delta),
                                  theta);
        return std::exp(-t);
    }
    throw std::domain_error("archimedean_copula: family must be Frank or Gumbel");
}

double archimedean_kendall_tau(Family family, double theta) {
    if (family == Family::Gumbel) {
        if (!(theta > 0.0 && theta <= 1.0))
            throw std::domain_error("archimedean_kendall_tau: Gumbel theta in (0, 1]");
        return 1.0 - theta;  // 1 - 1/delta with delta = 1/theta
    }
    if (family != Family::Frank)
        throw std::domain_error("archimedean_kendall_tau: family must be Frank or Gumbel");
    if (theta == 0.0) return 0.0;
    // tau = 1 + 4 int_0^1 phi(t)/phi'(t) dt with the Frank generator
    // phi(t) = ln[(e^theta - 1)/(e^{theta t} - 1)]; absolute values keep the
    // same branch for theta < 0.
    const auto integrand = [theta](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double num_ = std::log(std::abs(std::expm1(theta))) -
                            std::log(std::abs(std::expm1(theta * t)));
        const double den = -theta * std::exp(theta * t) / std::expm1(theta * t);
        return num_ / den;
    };
    num::QuadratureSpec q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-12;
    return 1.0 + 4.0 * num::integrate(integrand, 0.0, 1.0, q);
}

double model_tail_exact(const ModelSpec& model, double rho, double p,
                        Corner corner, const num::QuadratureSpec& q) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("model_tail_exact: p must lie in (0, 1)");
    const auto copula = [&](double u, double v) {
        switch (model.family) {
            case Family::Gaussian: return num::gaussian_copula(u, v, rho, q);
            case Family::Student: return num::student_copula(u, v, rho, model.nu, q);
            case Family::Frank: return archimedean_copula(Family::Frank, model.theta, u, v);
            case Family::Gumbel: return archimedean_copula(Family::Gumbel, model.theta, u, v);
            default:
                throw std::domain_error("model_tail_exact: unsupported family");
        }
    };
    double val = 0.0;
    switch (corner) {
        case Corner::UU: val = (1.0 - 2.0 * p + copula(p, p)) / (1.0 - p); break;
        case Corner::LL: val = copula(1.0 - p, 1.0 - p) / (1.0 - p); break;
        case Corner::UL: val = (1.0 - p - copula(p, 1.0 - p)) / (1.0 - p); break;
        case Corner::LU: val = (1.0 - p - copula(1.0 - p, p)) / (1.0 - p); break;
    }
    return std::clamp(val, 0.0, 1.0);
}

EffectiveExponent lognormal_student_dictionary(double s) {
    if (!(s > 0.0))
        throw std::domain_error("lognormal_student_dictionary: s must be positive");
    const double e = std::exp(4.0 * s * s);
    return {(4.0 * e - 2.0) / (e - 1.0), 2.0 + 0.5 / (s * s)};
}

PseudoEllipticalPrediction pseudo_elliptical_predictions(double r, double c,
                                                         double s) {
    if (!(std::abs(r) <= 1.0 && std::abs(c) <= 1.0 && s >= 0.0))
        throw std::domain_error("pseudo_elliptical_predictions: parameter out of range");
    const double s2 = s * s;
    const double f1c = std::exp(s2 * c), f1 = std::exp(s2);
    const double f2c = std::exp(4.0 * s2 * c), f2 = std::exp(4.0 * s2);
    PseudoEllipticalPrediction out;
    out.rho = f1c / f1 * r;
    out.zeta2 = (f2c * (1.0 + 2.0 * r * r) - 1.0) / (3.0 * f2 - 1.0);
    out.zeta1 = (f1c * num::d_func(r) - 1.0) / (0.5 * kPi * f1 - 1.0);
    out.cstar = 0.25 + std::asin(r) / (2.0 * kPi);
    return out;
}

EllipticityResiduals ellipticity_residuals(double rho, double cstar,
                                           std::optional<double> s) {
    if (!(std::abs(rho) <= 1.0) || !std::isfinite(cstar))
        throw std::domain_error("ellipticity_residuals: bad inputs");
    const double cosval = std::cos(2.0 * kPi * cstar);
    EllipticityResiduals out;
    out.residual = -cosval - rho;
    if (rho > 0.0 && cosval != 0.0) {
        out.z = std::log(rho / std::abs(cosval));
        if (s && *s > 0.0) out.c_implied = 1.0 + *out.z / (*s * *s);
    }
    return out;
}

namespace {

// Fixed graded Gauss-Legendre grid on the real line for the Hoeffding
// covariance integral; 16-point rule per panel, panels doubling outward.
struct LineGrid {
    std::vector<double> x, w;
};

LineGrid make_line_grid(double xmax) {
    static const std::array<double, 8> gx = {
        0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
        0.9445750230732326, 0.9894009349916499};
    static const std::array<double, 8> gw = {
        0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
        0.0622535239386479, 0.0271524594117541};
    std::vector<double> breaks{0.0, 0.5, 1.0};
    while (breaks.back() < xmax) breaks.push_back(breaks.back() * 2.0);
    LineGrid g;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int k = 0; k < 8; ++k) {
            for (double sgn : {-1.0, 1.0}) {
                const double node = c + sgn * h * gx[k];
                g.x.push_back(node);
                g.w.push_back(h * gw[k]);
                g.x.push_back(-node);
                g.w.push_back(h * gw[k]);
            }
        }
    }
    return g;
}

}  // namespace

double frank_calibrate_theta(double rho_target, double marginal_nu) {
    if (!(std::abs(rho_target) < 1.0))
        throw std::domain_error("frank_calibrate_theta: |rho_target| must be < 1");
    if (!(marginal_nu > 2.0))
        throw std::domain_error("frank_calibrate_theta: marginal variance needs nu > 2");
    if (std::abs(rho_target) < 1e-12) return 0.0;

    const double nu = marginal_nu;
    const double xmax = num::student_quantile(1.0 - 1e-12, nu);
    const LineGrid grid = make_line_grid(xmax);
    std::vector<double> cdf(grid.x.size());
    for (std::size_t i = 0; i < grid.x.size(); ++i)
        cdf[i] = num::student_cdf(grid.x[i], nu);

    const double variance = nu / (nu - 2.0);
    const auto rho_of_theta = [&](double theta) {
        // Hoeffding: Cov = int int [C(F(x),F(y)) - F(x)F(y)] dx dy.
        double cov = 0.0;
        for (std::size_t i = 0; i < grid.x.size(); ++i) {
            const double u = cdf[i];
            const double eu = std::expm1(theta * u);
            double row = 0.0;
            const double d = std::expm1(theta);
            for (std::size_t j = 0; j < grid.x.size(); ++j) {
                const double v = cdf[j];
                const double cuv = std::log1p(eu * std::expm1(theta * v) / d) / theta;
                row += grid.w[j] * (cuv - u * v);
            }
            cov += grid.w[i] * row;
        }
        return cov / variance;
    };

    // rho(theta) is decreasing with this generator convention; bracket and
    // bisect with secant acceleration.
    double lo = -1e-6, hi = 1e-6;
    while (rho_of_theta(lo) < rho_target) {
        lo *= 2.0;
        if (lo < -500.0) throw std::runtime_error("frank_calibrate_theta: no bracket");
    }
    while (rho_of_theta(hi) > rho_target) {
        hi *= 2.0;
        if (hi > 500.0) throw std::runtime_error("frank_calibrate_theta: no bracket");
    }
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double f = rho_of_theta(mid);
        if (std::abs(f - rho_target) < 1e-6) return mid;
        if (f > rho_target) a = mid; else b = mid;
    }
    throw std::runtime_error("frank_calibrate_theta: did not converge");
}

double toy_cstar(double kappa1, double kappa2) {
    if (!std::isfinite(kappa1) || !std::isfinite(kappa2))
        throw std::domain_error("toy_cstar: kurtoses must be finite");
    return 0.25 + (kappa2 - kappa1) / (24.0 * kPi);
}

}  // namespace depstat::models
