#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "depstat/estimators.hpp"
#include "depstat/models.hpp"
#include "depstat/rng.hpp"

namespace depstat::panel {

/// Immutable dated return panel. Missing cells are NaN.
struct ReturnPanel {
    std::vector<std::string> dates;   // strictly increasing, ISO-8601
    std::vector<std::string> assets;  // column labels
    std::vector<double> returns;      // row-major T x N

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return assets.size(); }
    double at(std::size_t t, std::size_t i) const { return returns[t * assets.size() + i]; }
    double& at(std::size_t t, std::size_t i) { return returns[t * assets.size() + i]; }
};

struct LoadReport {
    std::vector<std::string> dropped_assets;  // below min_overlap
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses the panel CSV format (header `date,A,B,...`; empty cell = missing).
/// Assets with fewer than min_overlap observations are dropped and reported.
ReturnPanel load_panel(std::istream& in, std::size_t min_overlap = 250,
                       LoadReport* report = nullptr);

void write_panel_csv(const ReturnPanel& p, std::ostream& out);

/// Rows where both assets are observed, in date order.
est::PairSample align_pair(const ReturnPanel& p, std::size_t i, std::size_t j);

struct PairObservables {
    std::string asset_i;
    std::string asset_j;
    std::size_t t_overlap = 0;
    double rho = 0, rho_sign = 0, zeta1 = 0, zeta2 = 0, kendall = 0;
    double tau_uu = 0, tau_ll = 0, tau_ul = 0, tau_lu = 0;
    double cstar = 0, residual = 0;
    std::optional<double> z;
};

struct ScanOptions {
    double p_star = 0.95;
    std::size_t min_overlap = 250;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// One row per unordered pair with sufficient overlap, ordered
/// lexicographically by (asset_i, asset_j). Thread-count independent.
std::vector<PairObservables> pairscan(const ReturnPanel& p, const ScanOptions& opts = {});

struct BinStat {
    double mean = 0;
    double sd = 0;  // 1 s.d. dispersion of the members
    std::size_t count = 0;
};

struct BinnedCurve {
    std::vector<double> rho_lo, rho_hi, rho_mean;
    std::vector<std::size_t> count;
    std::vector<std::string> observables;       // column names
    std::vector<std::vector<BinStat>> stats;    // [bin][observable]
};

/// Equal-count bins over rho. Observables: rho_sign, zeta1, zeta2, kendall,
/// tau_uu, tau_ll, tau_ul, tau_lu, cstar, residual, z (z over defined members).
BinnedCurve bin_by_rho(const std::vector<PairObservables>& table, std::size_t n_bins);

struct ProfileBin {
    double rho_mean = 0;
    std::size_t count = 0;
    std::vector<double> p_grid;
    std::vector<double> delta_diag_mean, delta_diag_sd;
    std::vector<double> delta_anti_mean, delta_anti_sd;
};

std::vector<ProfileBin> profile_by_bin(const ReturnPanel& p, std::size_t n_bins,
                                       std::span<const double> grid,
                                       const ScanOptions& opts = {});

struct EwmaQuantiles {
    std::vector<std::string> dates;          // after burn-in
    std::vector<double> levels;              // requested quantiles
    std::vector<std::vector<double>> values; // [date][level]
};

/// Cross-sectional quantiles of the pairwise EWMA correlation distribution,
/// decay e^{-1/timescale}; the first `timescale` dates are burn-in.
EwmaQuantiles ewma_corr_quantiles(const ReturnPanel& p, std::size_t timescale_days,
                                  std::span<const double> quantile_set);

struct RollingOverlay {
    std::string model;
    std::vector<double> pred_meanrho_uu;  // model tail at the window mean rho
    std::vector<double> pred_rhodist_uu;  // mean of model tail over the rho distribution
};

struct RollingTail {
    std::vector<std::string> window_end_dates;
    std::vector<double> tau_uu, tau_ll;
    std::vector<RollingOverlay> overlays;
};

RollingTail rolling_tail(const ReturnPanel& p, std::size_t window, std::size_t step,
                         double p_level, std::span<const models::ModelSpec> overlays,
                         const ScanOptions& opts = {});

struct ElliptestBin {
    double rho_lo = 0, rho_hi = 0;
    double rho_mean = 0;
    std::size_t count = 0;
    BinStat resid, z;          // empirical
    BinStat sim_resid, sim_z;  // simulated null
    double resid_dispersion_ratio = 0;  // empirical sd / simulated sd
    double z_dispersion_ratio = 0;
};

struct ElliptestReport {
    std::vector<ElliptestBin> bins;
    std::size_t n_pairs = 0;
    std::size_t n_sim_pairs = 0;
    double shrinkage = 0;        // intensity applied to the empirical corr matrix
    double min_eigenvalue = 0;   // before PSD repair
};

struct ElliptestOptions {
    std::size_t n_bins = 10;
    std::size_t n_reps = 4;  // pooled simulated replicas
    ScanOptions scan;
};

/// Compares the empirical residual/z curves against the same pipeline run on
/// panels simulated from null_model with the panel's (shrunk, PSD-repaired)
/// empirical correlation matrix.
ElliptestReport elliptest(const ReturnPanel& p, const models::ModelSpec& null_model,
                          const mc::SeedSpec& seed, const ElliptestOptions& opts = {});

}  // namespace depstat::panel
