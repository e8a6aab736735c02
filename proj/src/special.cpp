#include "depstat/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace depstat::num {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

double gaussian_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double gaussian_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("gaussian_quantile: p must lie in (0, 1)");
    // Acklam's rational approximation, then two Newton refinements.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double r = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
            ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
    } else if (p > 1.0 - plow) {
        const double r = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
            ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
    } else {
        const double r = p - 0.5;
        const double t = r * r;
        x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * r /
            (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        const double e = gaussian_cdf(x) - p;
        const double u = e / gaussian_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);  // Halley step
    }
    return x;
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Symmetry switch keeps the continued fraction convergent.
    if (x > (a + 1.0) / (a + b + 2.0))
        return 1.0 - incomplete_beta(b, a, 1.0 - x);

    const double ln_front = a * std::log(x) + b * std::log1p(-x) +
                            std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    // Modified Lentz continued fraction.
    const double tiny = 1e-300;
    double f = 1.0, cnum = 1.0, dden = 0.0;
    for (int m = 0; m <= 300; ++m) {
        double numerator;
        if (m == 0) {
            numerator = 1.0;
        } else if (m % 2 == 0) {
            const double k = m / 2.0;
            numerator = k * (b - k) * x / ((a + 2.0 * k - 1.0) * (a + 2.0 * k));
        } else {
            const double k = (m - 1.0) / 2.0;
            numerator = -(a + k) * (a + b + k) * x /
                        ((a + 2.0 * k) * (a + 2.0 * k + 1.0));
        }
        dden = 1.0 + numerator * dden;
        if (std::abs(dden) < tiny) dden = tiny;
        dden = 1.0 / dden;
        cnum = 1.0 + numerator / cnum;
        if (std::abs(cnum) < tiny) cnum = tiny;
        const double delta = cnum * dden;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(ln_front) / a * (f - 1.0);
}

double student_pdf(double x, double nu) {
    if (!(nu > 0.0)) throw std::domain_error("student_pdf: nu must be positive");
    const double ln = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(nu * kPi) -
                      0.5 * (nu + 1.0) * std::log1p(x * x / nu);
    return std::exp(ln);
}

double student_cdf(double x, double nu) {
    if (!(nu > 0.0)) throw std::domain_error("student_cdf: nu must be positive");
    if (x == 0.0) return 0.5;
    const double t = nu / (nu + x * x);
    const double half_tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, t);
    return x > 0.0 ? 1.0 - half_tail : half_tail;
}

double student_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("student_quantile: p must lie in (0, 1)");
    if (!(nu > 0.0)) throw std::domain_error("student_quantile: nu must be positive");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_quantile(1.0 - p, nu);

    // Bracket [0, hi], expand hi by the power-law tail, then bisect with
    // Newton acceleration to 1e-12 in probability space.
    double lo = 0.0, hi = 1.0;
    while (student_cdf(hi, nu) < p) hi *= 2.0;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double e = student_cdf(x, nu) - p;
        if (std::abs(e) < 1e-13) break;
        if (e > 0.0) hi = x; else lo = x;
        const double dens = student_pdf(x, nu);
        double xn = x - e / dens;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    return x;
}

double d_func(double r) {
    if (!(std::abs(r) <= 1.0)) throw std::domain_error("d_func: |r| must be <= 1");
    return std::sqrt(std::max(0.0, 1.0 - r * r)) + r * std::asin(r);
}

namespace {

// Frechet-bound edge cases common to both copulas; returns true when the
// value is determined without quadrature.
bool copula_edge(double u, double v, double rho, double& out) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
        throw std::domain_error("copula: u, v must lie in [0, 1]");
    if (!(std::abs(rho) <= 1.0))
        throw std::domain_error("copula: |rho| must be <= 1");
    if (u == 0.0 || v == 0.0) { out = 0.0; return true; }
    if (u == 1.0) { out = v; return true; }
    if (v == 1.0) { out = u; return true; }
    if (rho == 1.0) { out = std::min(u, v); return true; }
    if (rho == -1.0) { out = std::max(0.0, u + v - 1.0); return true; }
    return false;
}

}  // namespace

double gaussian_copula(double u, double v, double rho, const QuadratureSpec& q) {
    double edge;
    if (copula_edge(u, v, rho, edge)) return edge;
    if (rho == 0.0) return u * v;
    // C(u,v) = int_{-inf}^{Phi^-1(u)} phi(x) Phi((Phi^-1(v) - rho x)/s) dx.
    const double xu = gaussian_quantile(u);
    const double yv = gaussian_quantile(v);
    const double s = std::sqrt(1.0 - rho * rho);
    const double lo = std::min(xu, -8.5) - 1.0;
    const double val = integrate(
        [&](double x) {
            return gaussian_pdf(x) * gaussian_cdf((yv - rho * x) / s);
        },
        lo, xu, q);
    return std::clamp(val, 0.0, std::min(u, v));
}

double student_copula(double u, double v, double rho, double nu,
                      const QuadratureSpec& q) {
    if (!(nu > 0.0)) throw std::domain_error("student_copula: nu must be positive");
    double edge;
    if (copula_edge(u, v, rho, edge)) return edge;
    // Integrate the conditional cdf in probability space:
    // C(u,v) = int_0^u T_{nu+1}( (y_v - rho x_t) * sqrt((nu+1)/((1-rho^2)(nu+x_t^2))) ) dt.
    const double yv = student_quantile(v, nu);
    const double om = 1.0 - rho * rho;
    const double val = integrate(
        [&](double t) {
            if (t <= 0.0) return 0.0;
            if (t >= 1.0) t = 1.0 - 1e-16;
            const double xt = student_quantile(t, nu);
            const double scale = std::sqrt((nu + 1.0) / (om * (nu + xt * xt)));
            return student_cdf((yv - rho * xt) * scale, nu + 1.0);
        },
        0.0, u, q);
    return std::clamp(val, 0.0, std::min(u, v));
}

}  // namespace depstat::num
