#include "depstat/samplers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace depstat::mc {

namespace {

using models::Family;
using models::ModelSpec;

FactorSpec toy_factor(double kappa) {
    if (kappa == 0.0) return {FactorKind::Gaussian, 0.0};
    return {FactorKind::BinaryVol, kappa};
}

void validate_factor(const FactorSpec& f) {
    switch (f.kind) {
        case FactorKind::Gaussian:
            if (f.kappa != 0.0)
                throw std::domain_error("Gaussian factor has zero excess kurtosis");
            return;
        case FactorKind::StudentTuned:
            if (!(f.kappa > 0.0))
                throw std::domain_error("StudentTuned factor needs kappa > 0");
            return;
        case FactorKind::BinaryVol:
            if (!(f.kappa >= 0.0 && f.kappa <= 3.0))
                throw std::domain_error("BinaryVol factor needs kappa in [0, 3]");
            return;
    }
    throw std::domain_error("unknown factor kind");
}

/// Common per-row volatility draw for the elliptical families.
double draw_sigma(const ModelSpec& model, Rng& rng) {
    switch (model.family) {
        case Family::Gaussian:
            return 1.0;
        case Family::Student:
            return std::sqrt(model.nu / rng.chi_square(model.nu));
        case Family::LogNormalVol:
            return std::exp(model.s * rng.normal());
        default:
            throw std::domain_error("draw_sigma: not an elliptical family");
    }
}

std::string iso_date(std::chrono::sys_days d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

// Frank generator in the convention phi(u) = ln|e^theta - 1| - ln|e^{theta u} - 1|
// (theta > 0 gives negative association). Valid for either sign of theta.
struct FrankGen {
    double theta;
    double phi(double u) const {
        return std::log(std::abs(std::expm1(theta))) -
               std::log(std::abs(std::expm1(theta * u)));
    }
    double phi_over_dphi(double u) const {
        // phi'(u) = -theta e^{theta u} / (e^{theta u} - 1)
        return -phi(u) * std::expm1(theta * u) /
               (theta * std::exp(theta * u));
    }
    double inv(double y) const {
        return std::log1p(std::expm1(theta) * std::exp(-y)) / theta;
    }
};

// Gumbel with internal exponent delta = 1/theta, theta in (0, 1].
struct GumbelGen {
    double delta;
    double phi(double u) const { return std::pow(-std::log(u), delta); }
    double phi_over_dphi(double u) const { return u * std::log(u) / delta; }
    double inv(double y) const { return std::exp(-std::pow(y, 1.0 / delta)); }
};

template <class Gen>
double kendall_inverse(const Gen& g, double w) {
    // K(x) = x - phi(x)/phi'(x) is increasing on (0,1) with K(0+)=0, K(1)=1.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double k = mid - g.phi_over_dphi(mid);
        (k < w ? lo : hi) = mid;
        if (hi - lo < 1e-12) return 0.5 * (lo + hi);
    }
    throw std::runtime_error("archimedean sampler: K^-1 bisection failed to converge");
}

template <class Gen>
est::PairSample archimedean_rows(const Gen& g, std::size_t T, const SeedSpec& seed) {
    est::PairSample out;
    out.x.resize(T);
    out.y.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        Rng rng(seed, t);
        const double s = rng.uniform();
        const double w = rng.uniform();
        const double wp = kendall_inverse(g, w);
        const double pw = g.phi(wp);
        out.x[t] = g.inv(s * pw);
        out.y[t] = g.inv((1.0 - s) * pw);
    }
    return out;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
    if (n == 0) throw std::domain_error("CorrelationMatrix: dimension must be positive");
    for (std::size_t i = 0; i < n; ++i) a_[i * n + i] = 1.0;
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t n) { return CorrelationMatrix(n); }

CorrelationMatrix CorrelationMatrix::one_factor(std::size_t n, double rho) {
    CorrelationMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) m.set(i, j, rho);
    return m;
}

void CorrelationMatrix::set(std::size_t i, std::size_t j, double v) {
    if (i == j) {
        if (v != 1.0) throw std::domain_error("CorrelationMatrix: diagonal must be 1");
        return;
    }
    if (!(v >= -1.0 && v <= 1.0))
        throw std::domain_error("CorrelationMatrix: entries must lie in [-1, 1]");
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
}

std::vector<double> CorrelationMatrix::cholesky() const {
    std::vector<double> L(n_ * n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        double d = a_[j * n_ + j];
        for (std::size_t k = 0; k < j; ++k) d -= L[j * n_ + k] * L[j * n_ + k];
        if (!(d > 1e-12))
            throw std::domain_error(
                "CorrelationMatrix: not positive definite (leading minor of order " +
                std::to_string(j + 1) + " is non-positive)");
        L[j * n_ + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n_; ++i) {
            double s = a_[i * n_ + j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i * n_ + k] * L[j * n_ + k];
            L[i * n_ + j] = s / L[j * n_ + j];
        }
    }
    return L;
}

est::PairSample sample_elliptical_pair(const models::ModelSpec& model, double rho,
                                       std::size_t T, const SeedSpec& seed) {
    if (!model.is_elliptical())
        throw std::domain_error("sample_elliptical_pair: elliptical families only");
    model.validate();
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::domain_error("sample_elliptical_pair: |rho| <= 1 required");
    if (T < 1) throw std::domain_error("sample_elliptical_pair: T >= 1 required");
    const double b = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    est::PairSample out;
    out.x.resize(T);
    out.y.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        Rng rng(seed, t);
        const double sigma = draw_sigma(model, rng);
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        out.x[t] = sigma * z1;
        out.y[t] = sigma * (rho * z1 + b * z2);
    }
    return out;
}

est::PairSample sample_pseudo_elliptical_pair(double r, double c, double s,
                                              std::size_t T, const SeedSpec& seed) {
    if (!(r >= -1.0 && r <= 1.0) || !(c >= -1.0 && c <= 1.0) || !(s >= 0.0))
        throw std::domain_error("sample_pseudo_elliptical_pair: invalid parameters");
    if (T < 1) throw std::domain_error("sample_pseudo_elliptical_pair: T >= 1 required");
    const double b = std::sqrt(std::max(0.0, 1.0 - r * r));
    const double ac = std::sqrt(std::abs(c));
    const double bc = std::sqrt(std::max(0.0, 1.0 - std::abs(c)));
    const double sgn = c < 0.0 ? -1.0 : 1.0;
    est::PairSample out;
    out.x.resize(T);
    out.y.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        Rng rng(seed, t);
        const double eta0 = rng.normal();
        const double xi1 = s * (ac * eta0 + bc * rng.normal());
        const double xi2 = s * (sgn * ac * eta0 + bc * rng.normal());
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        out.x[t] = std::exp(xi1) * z1;
        out.y[t] = std::exp(xi2) * (r * z1 + b * z2);
    }
    return out;
}

est::PairSample sample_archimedean_pair(models::Family family, double theta,
                                        std::size_t T, const SeedSpec& seed) {
    if (T < 1) throw std::domain_error("sample_archimedean_pair: T >= 1 required");
    switch (family) {
        case Family::Frank:
            if (theta == 0.0 || !std::isfinite(theta))
                throw std::domain_error("Frank: theta must be finite and nonzero");
            return archimedean_rows(FrankGen{theta}, T, seed);
        case Family::Gumbel:
            if (!(theta > 0.0 && theta <= 1.0))
                throw std::domain_error("Gumbel: theta must lie in (0, 1]");
            return archimedean_rows(GumbelGen{1.0 / theta}, T, seed);
        default:
            throw std::domain_error("sample_archimedean_pair: Frank or Gumbel only");
    }
}

double sample_factor(const FactorSpec& spec, Rng& rng) {
    switch (spec.kind) {
        case FactorKind::Gaussian:
            return rng.normal();
        case FactorKind::StudentTuned: {
            const double nu = 4.0 + 6.0 / spec.kappa;
            const double t = rng.normal() / std::sqrt(rng.chi_square(nu) / nu);
            return t * std::sqrt((nu - 2.0) / nu);
        }
        case FactorKind::BinaryVol: {
            const double a = std::sqrt(spec.kappa / 3.0);
            const double sig2 = rng.uniform() < 0.5 ? 1.0 + a : 1.0 - a;
            return std::sqrt(sig2) * rng.normal();
        }
    }
    throw std::domain_error("unknown factor kind");
}

est::PairSample sample_toy_pair(const FactorSpec& f1, const FactorSpec& f2,
                                std::size_t T, const SeedSpec& seed) {
    validate_factor(f1);
    validate_factor(f2);
    if (T < 1) throw std::domain_error("sample_toy_pair: T >= 1 required");
    est::PairSample out;
    out.x.resize(T);
    out.y.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        Rng rng(seed, t);
        const double psi1 = sample_factor(f1, rng);
        const double psi2 = sample_factor(f2, rng);
        out.x[t] = psi1 + psi2;
        out.y[t] = psi1 - psi2;
    }
    return out;
}

panel::ReturnPanel sample_panel(const CorrelationMatrix& corr,
                                const models::ModelSpec& model, std::size_t T,
                                const SeedSpec& seed) {
    model.validate();
    if (T < 1) throw std::domain_error("sample_panel: T >= 1 required");
    const std::size_t N = corr.dimension();
    panel::ReturnPanel p;
    p.assets.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "A%03zu", i);
        p.assets[i] = buf;
    }
    p.dates.resize(T);
    const std::chrono::sys_days start =
        std::chrono::sys_days(std::chrono::year{2000} / 1 / 3);
    for (std::size_t t = 0; t < T; ++t)
        p.dates[t] = iso_date(start + std::chrono::days(static_cast<long>(t)));
    p.returns.assign(T * N, 0.0);

    if (model.family == Family::TwoFactorToy) {
        if (N % 2 != 0)
            throw std::domain_error("sample_panel: toy family needs an even dimension");
        const FactorSpec common = toy_factor(model.kappa1);
        const FactorSpec spread = toy_factor(model.kappa2);
        validate_factor(common);
        validate_factor(spread);
        for (std::size_t t = 0; t < T; ++t) {
            Rng rng(seed, t);
            const double psi1 = sample_factor(common, rng);
            for (std::size_t k = 0; k < N / 2; ++k) {
                const double psi2 = sample_factor(spread, rng);
                p.at(t, 2 * k) = psi1 + psi2;
                p.at(t, 2 * k + 1) = psi1 - psi2;
            }
        }
        return p;
    }

    const std::vector<double> L = corr.cholesky();
    std::vector<double> z(N), x(N);
    const bool pseudo = model.family == Family::PseudoElliptical;
    if (pseudo && model.c < 0.0)
        throw std::domain_error(
            "sample_panel: equicorrelated log-vols require c >= 0");
    const double ac = pseudo ? std::sqrt(model.c) : 0.0;
    const double bc = pseudo ? std::sqrt(std::max(0.0, 1.0 - model.c)) : 0.0;
    std::vector<double> exi(N, 1.0);
    for (std::size_t t = 0; t < T; ++t) {
        Rng rng(seed, t);
        double sigma = 1.0;
        if (pseudo) {
            const double eta0 = rng.normal();
            for (std::size_t i = 0; i < N; ++i)
                exi[i] = std::exp(model.s * (ac * eta0 + bc * rng.normal()));
        } else {
            sigma = draw_sigma(model, rng);
        }
        for (std::size_t i = 0; i < N; ++i) z[i] = rng.normal();
        for (std::size_t i = 0; i < N; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k <= i; ++k) v += L[i * N + k] * z[k];
            x[i] = v;
        }
        for (std::size_t i = 0; i < N; ++i)
            p.at(t, i) = pseudo ? exi[i] * x[i] : sigma * x[i];
    }
    return p;
}

}  // namespace depstat::mc
