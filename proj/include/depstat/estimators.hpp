#pragma once

#include <optional>
#include <span>
#include <vector>

#include "depstat/quadrature.hpp"

namespace depstat::est {

/// One aligned pair of return series (equal length, no missing values).
struct PairSample {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
};

/// Rank-transformed pair; each margin is a permutation of (k-0.5)/T up to
/// tie averaging.
struct UniformPair {
    std::vector<double> u;
    std::vector<double> v;

    std::size_t size() const { return u.size(); }
};

struct CorrCoeffs {
    double rho;       // Pearson correlation of raw returns (rho^(1))
    double rho_sign;  // sign correlation (rho^(0)), zeros dropped pairwise
    double rho2;      // correlation of signed squares (rho^(2))
    double zeta1;     // correlation of absolute values
    double zeta2;     // correlation of squares
};

enum class TailCorner { UU, LL, UL, LU };

struct TailEstimate {
    double value;
    bool sparse_warning;  // T*(1-p) below the recommended minimum
};

enum class RhoRefPolicy { Pearson, KendallImplied };

struct CopulaProfile {
    std::vector<double> p_grid;
    std::vector<double> delta_diag;
    std::vector<double> delta_anti;
    double rho_ref;
};

class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Empirical marginal-cdf transform u_t = (rank_t - 0.5)/T with average
/// ranks on ties. Throws DegenerateInput for a constant series.
std::vector<double> rank_transform(std::span<const double> x);

UniformPair rank_transform_pair(const PairSample& pair);

CorrCoeffs corr_coeffs(const PairSample& pair);

/// Empirical copula C(p, q) = (1/T) #{t : u_t <= p and v_t <= q}.
double empirical_copula(const UniformPair& up, double p, double q);

/// Diagonal and anti-diagonal of the empirical copula on a sorted grid,
/// O((T + G) log T) via a rank Fenwick tree. Equals the pointwise
/// empirical_copula exactly.
struct DiagonalCounts {
    std::vector<double> diag;  // C(p, p)
    std::vector<double> anti;  // C(p, 1-p)
};
DiagonalCounts empirical_copula_diagonals(const UniformPair& up,
                                          std::span<const double> grid);

TailEstimate tail_dependence(const UniformPair& up, double p, TailCorner corner);

/// Central copula value C(1/2, 1/2); the exact-median point of an odd-length
/// series is excluded (strict inequality).
double cstar(const UniformPair& up);

/// Kendall's tau-b via O(T log T) merge-sort concordance counting with tie
/// correction.
double kendall_tau(std::span<const double> x, std::span<const double> y);

inline double kendall_tau(const UniformPair& up) { return kendall_tau(up.u, up.v); }

/// Rescaled differences with the Gaussian copula along the diagonal and
/// anti-diagonal. pearson_rho supplies the reference correlation under the
/// Pearson policy.
CopulaProfile copula_profile(const UniformPair& up, std::span<const double> grid,
                             RhoRefPolicy policy, double pearson_rho,
                             const num::QuadratureSpec& q = {});

/// The default 99-point grid 0.01..0.99 (contains 0.5 exactly).
std::vector<double> default_profile_grid();

}  // namespace depstat::est
