#pragma once

#include "depstat/quadrature.hpp"

namespace depstat::num {

/// Standard normal cdf.
double gaussian_cdf(double x);

/// Standard normal pdf.
double gaussian_pdf(double x);

/// Standard normal quantile; requires 0 < p < 1.
double gaussian_quantile(double p);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation with the usual symmetry switch.
double incomplete_beta(double a, double b, double x);

/// Univariate Student-t density with nu > 0 degrees of freedom.
double student_pdf(double x, double nu);

/// Univariate Student-t cdf, via the regularized incomplete beta function.
double student_cdf(double x, double nu);

/// Student-t quantile; requires 0 < p < 1, nu > 0.
double student_quantile(double p, double nu);

/// D(r) = sqrt(1 - r^2) + r*arcsin(r), the absolute-value correlation kernel
/// of a bivariate Gaussian. Requires |r| <= 1.
double d_func(double r);

/// Bivariate Gaussian copula C_G(u, v; rho), evaluated by quadrature of the
/// conditional cdf. |rho| = 1 handled analytically (Frechet bounds).
double gaussian_copula(double u, double v, double rho,
                       const QuadratureSpec& q = {});

/// Bivariate Student copula C_t(u, v; rho, nu), evaluated by quadrature of
/// the T_{nu+1} conditional form.
double student_copula(double u, double v, double rho, double nu,
                      const QuadratureSpec& q = {});

}  // namespace depstat::num
