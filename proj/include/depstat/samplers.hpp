#pragma once

#include <cstddef>
#include <vector>

#include "depstat/estimators.hpp"
#include "depstat/models.hpp"
#include "depstat/panel.hpp"
#include "depstat/rng.hpp"

namespace depstat::mc {

/// Symmetric unit-diagonal correlation matrix; PSD is checked lazily by the
/// Cholesky factorization.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(std::size_t n);
    static CorrelationMatrix identity(std::size_t n);
    static CorrelationMatrix one_factor(std::size_t n, double rho);

    std::size_t dimension() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v);

    /// Lower Cholesky factor (row-major). Throws std::domain_error naming the
    /// first non-positive leading minor.
    std::vector<double> cholesky() const;

private:
    std::size_t n_;
    std::vector<double> a_;
};

est::PairSample sample_elliptical_pair(const models::ModelSpec& model, double rho,
                                       std::size_t T, const SeedSpec& seed);

est::PairSample sample_pseudo_elliptical_pair(double r, double c, double s,
                                              std::size_t T, const SeedSpec& seed);

/// Uniform-marginal pair from the Frank/Gumbel copula via the conditional
/// Kendall-function construction (w' = K^{-1}(w)).
est::PairSample sample_archimedean_pair(models::Family family, double theta,
                                        std::size_t T, const SeedSpec& seed);

enum class FactorKind {
    Gaussian,      // kappa = 0
    StudentTuned,  // Student nu = 4 + 6/kappa, unit-variance scaled
    BinaryVol,     // sigma^2 = 1 +/- sqrt(kappa/3) two-point volatility
};

struct FactorSpec {
    FactorKind kind = FactorKind::Gaussian;
    double kappa = 0.0;  // target excess kurtosis (unit variance throughout)
};

/// X1 = psi1 + psi2, X2 = psi1 - psi2 with independent symmetric unit-variance
/// factors; Pearson rho -> 0.
est::PairSample sample_toy_pair(const FactorSpec& f1, const FactorSpec& f2,
                                std::size_t T, const SeedSpec& seed);

/// Draw one factor sample (unit variance, symmetric).
double sample_factor(const FactorSpec& spec, Rng& rng);

/// Dated synthetic panel. Elliptical and pseudo-elliptical families use the
/// supplied correlation matrix for the Gaussian residuals. The toy family
/// (even N required) uses only its dimension: columns 2k/2k+1 are
/// psi1 +/- psi2^k with a shared psi1 (kappa1) and per-pair spreads (kappa2).
panel::ReturnPanel sample_panel(const CorrelationMatrix& corr,
                                const models::ModelSpec& model, std::size_t T,
                                const SeedSpec& seed);

}  // namespace depstat::mc
