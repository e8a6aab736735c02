#pragma once

#include <optional>
#include <string>

#include "depstat/quadrature.hpp"

namespace depstat::models {

enum class Family {
    Gaussian,
    Student,
    LogNormalVol,
    PseudoElliptical,
    Frank,
    Gumbel,
    TwoFactorToy,
};

enum class Corner { UU, LL, UL, LU };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Tagged description of a generative dependence model. Location is fixed to
/// zero and the volatility scale to one.
struct ModelSpec {
    Family family = Family::Gaussian;
    double nu = 0.0;      // Student degrees of freedom
    double s = 0.0;       // log-vol standard deviation
    double c = 1.0;       // log-vol correlation (PseudoElliptical)
    double r = 0.0;       // residual correlation (PseudoElliptical)
    double theta = 0.0;   // Archimedean parameter
    double kappa1 = 0.0;  // factor excess kurtoses (TwoFactorToy)
    double kappa2 = 0.0;

    static ModelSpec gaussian();
    static ModelSpec student(double nu);
    static ModelSpec lognormal_vol(double s);
    static ModelSpec pseudo_elliptical(double r, double c, double s);
    static ModelSpec frank(double theta);
    static ModelSpec gumbel(double theta);
    static ModelSpec two_factor_toy(double kappa1, double kappa2);

    bool is_elliptical() const {
        return family == Family::Gaussian || family == Family::Student ||
               family == Family::LogNormalVol;
    }
    void validate() const;
};

/// Volatility moment ratios f_d = E[sigma^2d] / E[sigma^d]^2. f2 is absent
/// when the underlying moment diverges (Student nu <= 4).
struct MomentRatios {
    double f1 = 1.0;
    std::optional<double> f2 = 1.0;
};

struct EllipticalPrediction {
    double zeta1;
    std::optional<double> zeta2;
    double cstar;
    double rho_sign;
};

struct PseudoEllipticalPrediction {
    double rho;
    double zeta1;
    double zeta2;
    double cstar;
};

/// Ellipticity diagnostics for one (rho, C*) observation. z (and c_implied)
/// are flagged missing rather than an error when undefined.
struct EllipticityResiduals {
    double residual;
    std::optional<double> z;
    std::optional<double> c_implied;
};

MomentRatios moment_ratios(const ModelSpec& model,
                           std::optional<double> c_override = std::nullopt);

EllipticalPrediction elliptical_predictions(const ModelSpec& model, double rho);

/// tau*_UU(nu, rho) = 2 - 2 T_{nu+1}(k(1)).
double student_tail_asymptote(double nu, double rho);

/// beta(nu, rho), the coefficient of the (1-p)^{2/nu} correction.
double student_tail_beta(double nu, double rho);

/// First-order expansion tau* + beta * (1-p)^{2/nu}.
double student_tail_expansion(double nu, double rho, double p);

/// Exact tail dependence of the model copula at level p, via quadrature or
/// the closed-form Archimedean expression.
double model_tail_exact(const ModelSpec& model, double rho, double p,
                        Corner corner, const num::QuadratureSpec& q = {});

struct EffectiveExponent {
    double exact;   // nu solving e^{4 s^2} = (nu-2)/(nu-4)
    double approx;  // 2 + 0.5/s^2
};

EffectiveExponent lognormal_student_dictionary(double s);

PseudoEllipticalPrediction pseudo_elliptical_predictions(double r, double c,
                                                         double s);

EllipticityResiduals ellipticity_residuals(double rho, double cstar,
                                           std::optional<double> s = std::nullopt);

/// Frank / Gumbel copula value. Gumbel uses internal exponent 1/theta with
/// theta in (0, 1], so its upper tail coefficient is 2 - 2^theta.
double archimedean_copula(Family family, double theta, double u, double v);

/// Kendall's tau of the Archimedean copula, 4*int C dC - 1 evaluated by
/// quadrature of the generator identity.
double archimedean_kendall_tau(Family family, double theta);

/// theta such that Frank(theta) with Student-nu marginals has linear
/// correlation rho_target (2-D quadrature + root find).
double frank_calibrate_theta(double rho_target, double marginal_nu);

/// Cumulant-order central copula value of the two-factor toy model.
double toy_cstar(double kappa1, double kappa2);

}  // namespace depstat::models
