#include "depstat/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <mutex>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "depstat/samplers.hpp"

namespace depstat::panel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    unsigned nt = threads == 0 ? std::thread::hardware_concurrency() : threads;
    if (nt == 0) nt = 1;
    nt = std::min<std::size_t>(nt, n == 0 ? 1 : n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (unsigned k = 0; k < nt; ++k) {
        pool.emplace_back([&, k] {
            try {
                for (std::size_t i = k; i < n; i += nt) fn(i);
            } catch (...) {
                std::scoped_lock lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

double vec_mean(const std::vector<double>& v) {
    return v.empty() ? kNaN
                     : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

BinStat member_stat(const std::vector<double>& v) {
    BinStat s;
    s.count = v.size();
    if (v.empty()) {
        s.mean = kNaN;
        s.sd = kNaN;
        return s;
    }
    s.mean = vec_mean(v);
    if (v.size() < 2) {
        s.sd = 0.0;
        return s;
    }
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / double(v.size() - 1));
    return s;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const double h = q * double(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

/// Equal-count partition: bin k covers sorted positions [k*n/B, (k+1)*n/B).
std::vector<std::size_t> bin_boundaries(std::size_t n, std::size_t n_bins) {
    std::vector<std::size_t> b(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) b[k] = k * n / n_bins;
    return b;
}

double pearson_nothrow(const double* x, const double* y, std::size_t n) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0 || syy <= 0) return kNaN;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

ReturnPanel load_panel(std::istream& in, std::size_t min_overlap, LoadReport* report) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("line 1: empty input");
    std::vector<std::string> header = split_csv(line);
    if (header.size() < 2 || header[0] != "date")
        throw ParseError("line 1: header must be `date,ASSET1,...`");
    ReturnPanel p;
    p.assets.assign(header.begin() + 1, header.end());
    const std::size_t N = p.assets.size();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv(line);
        if (cells.size() != N + 1)
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(N + 1) + " fields, got " +
                             std::to_string(cells.size()));
        if (!p.dates.empty()) {
            if (cells[0] == p.dates.back())
                throw ParseError("line " + std::to_string(lineno) +
                                 ": duplicate date " + cells[0]);
            if (cells[0] < p.dates.back())
                throw ParseError("line " + std::to_string(lineno) +
                                 ": dates not strictly increasing");
        }
        p.dates.push_back(cells[0]);
        for (std::size_t i = 0; i < N; ++i) {
            const std::string& c = cells[i + 1];
            if (c.empty()) {
                p.returns.push_back(kNaN);
                continue;
            }
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.size())
                throw ParseError("line " + std::to_string(lineno) +
                                 ": bad numeric cell `" + c + "`");
            p.returns.push_back(v);
        }
    }
    // Drop assets without enough observations.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t obs = 0;
        for (std::size_t t = 0; t < p.rows(); ++t)
            if (!std::isnan(p.at(t, i))) ++obs;
        if (obs >= min_overlap) {
            keep.push_back(i);
        } else if (report) {
            report->dropped_assets.push_back(p.assets[i]);
        }
    }
    if (keep.size() != N) {
        ReturnPanel q;
        q.dates = p.dates;
        for (std::size_t i : keep) q.assets.push_back(p.assets[i]);
        q.returns.reserve(p.rows() * keep.size());
        for (std::size_t t = 0; t < p.rows(); ++t)
            for (std::size_t i : keep) q.returns.push_back(p.at(t, i));
        return q;
    }
    return p;
}

void write_panel_csv(const ReturnPanel& p, std::ostream& out) {
    out << "date";
    for (const auto& a : p.assets) out << ',' << a;
    out << '\n';
    char buf[40];
    for (std::size_t t = 0; t < p.rows(); ++t) {
        out << p.dates[t];
        for (std::size_t i = 0; i < p.cols(); ++i) {
            const double v = p.at(t, i);
            out << ',';
            if (!std::isnan(v)) {
                std::snprintf(buf, sizeof(buf), "%.12g", v);
                out << buf;
            }
        }
        out << '\n';
    }
}

est::PairSample align_pair(const ReturnPanel& p, std::size_t i, std::size_t j) {
    est::PairSample s;
    for (std::size_t t = 0; t < p.rows(); ++t) {
        const double a = p.at(t, i), b = p.at(t, j);
        if (!std::isnan(a) && !std::isnan(b)) {
            s.x.push_back(a);
            s.y.push_back(b);
        }
    }
    return s;
}

std::vector<PairObservables> pairscan(const ReturnPanel& p, const ScanOptions& opts) {
    const std::size_t N = p.cols();
    if (N < 2) throw std::domain_error("pairscan: need at least 2 assets");
    struct PairIdx {
        std::size_t i, j;
    };
    std::vector<PairIdx> pairs;
    pairs.reserve(N * (N - 1) / 2);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) pairs.push_back({i, j});
    std::sort(pairs.begin(), pairs.end(), [&](const PairIdx& a, const PairIdx& b) {
        auto ka = std::minmax(p.assets[a.i], p.assets[a.j]);
        auto kb = std::minmax(p.assets[b.i], p.assets[b.j]);
        return ka < kb;
    });

    std::vector<std::optional<PairObservables>> rows(pairs.size());
    parallel_for(pairs.size(), opts.threads, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        est::PairSample ps = align_pair(p, i, j);
        if (ps.size() < opts.min_overlap || ps.size() < 2) return;
        PairObservables o;
        const bool swap = p.assets[j] < p.assets[i];
        o.asset_i = swap ? p.assets[j] : p.assets[i];
        o.asset_j = swap ? p.assets[i] : p.assets[j];
        if (swap) std::swap(ps.x, ps.y);
        o.t_overlap = ps.size();
        try {
            const est::CorrCoeffs cc = est::corr_coeffs(ps);
            o.rho = cc.rho;
            o.rho_sign = cc.rho_sign;
            o.zeta1 = cc.zeta1;
            o.zeta2 = cc.zeta2;
            const est::UniformPair up = est::rank_transform_pair(ps);
            o.kendall = est::kendall_tau(up);
            o.tau_uu = est::tail_dependence(up, opts.p_star, est::TailCorner::UU).value;
            o.tau_ll = est::tail_dependence(up, opts.p_star, est::TailCorner::LL).value;
            o.tau_ul = est::tail_dependence(up, opts.p_star, est::TailCorner::UL).value;
            o.tau_lu = est::tail_dependence(up, opts.p_star, est::TailCorner::LU).value;
            o.cstar = est::cstar(up);
        } catch (const est::DegenerateInput&) {
            return;  // degenerate pair: skipped like insufficient overlap
        }
        const models::EllipticityResiduals er =
            models::ellipticity_residuals(o.rho, o.cstar);
        o.residual = er.residual;
        o.z = er.z;
        rows[k] = std::move(o);
    });
    std::vector<PairObservables> out;
    out.reserve(rows.size());
    for (auto& r : rows)
        if (r) out.push_back(std::move(*r));
    return out;
}

BinnedCurve bin_by_rho(const std::vector<PairObservables>& table, std::size_t n_bins) {
    if (table.empty()) throw std::domain_error("bin_by_rho: empty table");
    if (n_bins == 0 || n_bins > table.size())
        throw std::domain_error("bin_by_rho: n_bins must lie in [1, pair count]");
    std::vector<std::size_t> order(table.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return table[a].rho < table[b].rho;
    });
    const std::vector<std::size_t> bd = bin_boundaries(table.size(), n_bins);

    BinnedCurve curve;
    curve.observables = {"rho_sign", "zeta1",  "zeta2", "kendall", "tau_uu",
                         "tau_ll",   "tau_ul", "tau_lu", "cstar",   "residual",
                         "z"};
    for (std::size_t k = 0; k < n_bins; ++k) {
        std::vector<double> rho;
        std::vector<std::vector<double>> cols(curve.observables.size());
        for (std::size_t pos = bd[k]; pos < bd[k + 1]; ++pos) {
            const PairObservables& o = table[order[pos]];
            rho.push_back(o.rho);
            const double vals[] = {o.rho_sign, o.zeta1,  o.zeta2, o.kendall,
                                   o.tau_uu,   o.tau_ll, o.tau_ul, o.tau_lu,
                                   o.cstar,    o.residual};
            for (std::size_t c = 0; c < 10; ++c) cols[c].push_back(vals[c]);
            if (o.z) cols[10].push_back(*o.z);
        }
        curve.rho_lo.push_back(rho.front());
        curve.rho_hi.push_back(rho.back());
        curve.rho_mean.push_back(vec_mean(rho));
        curve.count.push_back(rho.size());
        std::vector<BinStat> stats;
        for (auto& c : cols) stats.push_back(member_stat(c));
        curve.stats.push_back(std::move(stats));
    }
    return curve;
}

std::vector<ProfileBin> profile_by_bin(const ReturnPanel& p, std::size_t n_bins,
                                       std::span<const double> grid,
                                       const ScanOptions& opts) {
    const std::size_t N = p.cols();
    if (N < 2) throw std::domain_error("profile_by_bin: need at least 2 assets");
    struct Entry {
        double rho;
        est::CopulaProfile prof;
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) pairs.emplace_back(i, j);
    std::vector<std::optional<Entry>> entries(pairs.size());
    parallel_for(pairs.size(), opts.threads, [&](std::size_t k) {
        const est::PairSample ps = align_pair(p, pairs[k].first, pairs[k].second);
        if (ps.size() < opts.min_overlap || ps.size() < 2) return;
        const double rho = pearson_nothrow(ps.x.data(), ps.y.data(), ps.size());
        if (std::isnan(rho)) return;
        try {
            const est::UniformPair up = est::rank_transform_pair(ps);
            entries[k] = Entry{
                rho, est::copula_profile(up, grid, est::RhoRefPolicy::Pearson, rho)};
        } catch (const est::DegenerateInput&) {
        }
    });
    std::vector<const Entry*> kept;
    for (const auto& e : entries)
        if (e) kept.push_back(&*e);
    if (kept.empty()) throw std::domain_error("profile_by_bin: no usable pairs");
    if (n_bins == 0 || n_bins > kept.size())
        throw std::domain_error("profile_by_bin: n_bins must lie in [1, pair count]");
    std::sort(kept.begin(), kept.end(),
              [](const Entry* a, const Entry* b) { return a->rho < b->rho; });
    const std::vector<std::size_t> bd = bin_boundaries(kept.size(), n_bins);
    std::vector<ProfileBin> out;
    const std::size_t G = grid.size();
    for (std::size_t k = 0; k < n_bins; ++k) {
        ProfileBin bin;
        bin.p_grid.assign(grid.begin(), grid.end());
        bin.count = bd[k + 1] - bd[k];
        std::vector<double> rho;
        bin.delta_diag_mean.resize(G);
        bin.delta_diag_sd.resize(G);
        bin.delta_anti_mean.resize(G);
        bin.delta_anti_sd.resize(G);
        for (std::size_t g = 0; g < G; ++g) {
            std::vector<double> dd, da;
            for (std::size_t pos = bd[k]; pos < bd[k + 1]; ++pos) {
                dd.push_back(kept[pos]->prof.delta_diag[g]);
                da.push_back(kept[pos]->prof.delta_anti[g]);
            }
            const BinStat sd_ = member_stat(dd), sa = member_stat(da);
            bin.delta_diag_mean[g] = sd_.mean;
            bin.delta_diag_sd[g] = sd_.sd;
            bin.delta_anti_mean[g] = sa.mean;
            bin.delta_anti_sd[g] = sa.sd;
        }
        for (std::size_t pos = bd[k]; pos < bd[k + 1]; ++pos)
            rho.push_back(kept[pos]->rho);
        bin.rho_mean = vec_mean(rho);
        out.push_back(std::move(bin));
    }
    return out;
}

EwmaQuantiles ewma_corr_quantiles(const ReturnPanel& p, std::size_t timescale_days,
                                  std::span<const double> quantile_set) {
    if (timescale_days < 2)
        throw std::domain_error("ewma_corr_quantiles: timescale must be >= 2 days");
    const std::size_t N = p.cols();
    if (N < 2) throw std::domain_error("ewma_corr_quantiles: need at least 2 assets");
    const double lambda = std::exp(-1.0 / double(timescale_days));
    // Second-moment EWMA state (zero-mean convention for daily returns).
    std::vector<double> S(N * N, 0.0);
    EwmaQuantiles out;
    out.levels.assign(quantile_set.begin(), quantile_set.end());
    for (std::size_t t = 0; t < p.rows(); ++t) {
        for (std::size_t i = 0; i < N; ++i) {
            const double xi = p.at(t, i);
            if (std::isnan(xi)) continue;
            for (std::size_t j = i; j < N; ++j) {
                const double xj = p.at(t, j);
                if (std::isnan(xj)) continue;
                double& s = S[i * N + j];
                s = lambda * s + (1.0 - lambda) * xi * xj;
            }
        }
        if (t + 1 <= timescale_days) continue;  // burn-in, not emitted
        std::vector<double> rhos;
        rhos.reserve(N * (N - 1) / 2);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) {
                const double sii = S[i * N + i], sjj = S[j * N + j];
                if (sii <= 0 || sjj <= 0) continue;
                rhos.push_back(
                    std::clamp(S[i * N + j] / std::sqrt(sii * sjj), -1.0, 1.0));
            }
        if (rhos.empty()) continue;
        std::vector<double> qs;
        for (double q : out.levels) qs.push_back(quantile(rhos, q));
        out.dates.push_back(p.dates[t]);
        out.values.push_back(std::move(qs));
    }
    return out;
}

RollingTail rolling_tail(const ReturnPanel& p, std::size_t window, std::size_t step,
                         double p_level, std::span<const models::ModelSpec> overlays,
                         const ScanOptions& opts) {
    if (window < 50) throw std::domain_error("rolling_tail: window must be >= 50");
    if (step < 1) throw std::domain_error("rolling_tail: step must be >= 1");
    if (p.rows() < window) throw std::domain_error("rolling_tail: panel shorter than window");
    const std::size_t N = p.cols();
    const std::size_t overlap_req = std::min<std::size_t>(opts.min_overlap, window);
    RollingTail out;
    for (const auto& m : overlays)
        out.overlays.push_back({models::family_name(m.family), {}, {}});

    for (std::size_t start = 0; start + window <= p.rows(); start += step) {
        std::vector<double> rhos, tuu, tll;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) {
                est::PairSample ps;
                for (std::size_t t = start; t < start + window; ++t) {
                    const double a = p.at(t, i), b = p.at(t, j);
                    if (!std::isnan(a) && !std::isnan(b)) {
                        ps.x.push_back(a);
                        ps.y.push_back(b);
                    }
                }
                if (ps.size() < overlap_req || ps.size() < 2) continue;
                const double rho = pearson_nothrow(ps.x.data(), ps.y.data(), ps.size());
                if (std::isnan(rho)) continue;
                try {
                    const est::UniformPair up = est::rank_transform_pair(ps);
                    tuu.push_back(
                        est::tail_dependence(up, p_level, est::TailCorner::UU).value);
                    tll.push_back(
                        est::tail_dependence(up, p_level, est::TailCorner::LL).value);
                    rhos.push_back(rho);
                } catch (const est::DegenerateInput&) {
                }
            }
        if (rhos.empty()) continue;
        out.window_end_dates.push_back(p.dates[start + window - 1]);
        out.tau_uu.push_back(vec_mean(tuu));
        out.tau_ll.push_back(vec_mean(tll));
        const double rho_bar = vec_mean(rhos);
        for (std::size_t m = 0; m < out.overlays.size(); ++m) {
            out.overlays[m].pred_meanrho_uu.push_back(models::model_tail_exact(
                overlays[m], rho_bar, p_level, models::Corner::UU));
            double acc = 0.0;
            for (double r : rhos)
                acc += models::model_tail_exact(overlays[m], r, p_level,
                                                models::Corner::UU);
            out.overlays[m].pred_rhodist_uu.push_back(acc / double(rhos.size()));
        }
    }
    return out;
}

namespace {

struct PairRow {
    double rho;
    double residual;
    std::optional<double> z;
};

/// Empirical correlation matrix with half-split shrinkage toward the
/// constant-rho target; the noise floor of the pairwise estimates would
/// otherwise inflate the simulated null's cross-sectional rho dispersion.
mc::CorrelationMatrix shrunk_corr(const ReturnPanel& p, double& shrinkage_out,
                                  double& min_eig_out) {
    const std::size_t N = p.cols();
    std::vector<double> rho(N * N, 0.0);
    std::vector<double> full, half_gap2;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            const est::PairSample ps = align_pair(p, i, j);
            if (ps.size() < 4) continue;
            const double r = pearson_nothrow(ps.x.data(), ps.y.data(), ps.size());
            if (std::isnan(r)) continue;
            rho[i * N + j] = r;
            rho[j * N + i] = r;
            full.push_back(r);
            const std::size_t h = ps.size() / 2;
            const double ra = pearson_nothrow(ps.x.data(), ps.y.data(), h);
            const double rb =
                pearson_nothrow(ps.x.data() + h, ps.y.data() + h, ps.size() - h);
            if (!std::isnan(ra) && !std::isnan(rb))
                half_gap2.push_back(0.25 * (ra - rb) * (ra - rb));
        }
    if (full.empty()) throw std::domain_error("elliptest: no estimable pairs");
    const double rho_bar = vec_mean(full);
    double s_obs = 0.0;
    for (double r : full) s_obs += (r - rho_bar) * (r - rho_bar);
    s_obs /= double(full.size());
    const double v_noise = vec_mean(half_gap2);
    const double lambda =
        s_obs > 0.0 ? std::clamp(1.0 - v_noise / s_obs, 0.0, 1.0) : 0.0;
    shrinkage_out = 1.0 - lambda;  // amount pulled toward the constant target

    Eigen::MatrixXd M(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            M(i, j) = i == j ? 1.0 : rho_bar + lambda * (rho[i * N + j] - rho_bar);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    min_eig_out = es.eigenvalues().minCoeff();
    if (min_eig_out < -0.5)
        throw std::domain_error(
            "elliptest: correlation matrix repair out of tolerance (min eigenvalue " +
            std::to_string(min_eig_out) + ")");
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd R = es.eigenvectors() * ev.asDiagonal() *
                        es.eigenvectors().transpose();
    mc::CorrelationMatrix corr(N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            const double d = std::sqrt(R(i, i) * R(j, j));
            corr.set(i, j, d > 0 ? std::clamp(R(i, j) / d, -1.0, 1.0) : 0.0);
        }
    return corr;
}

}  // namespace

ElliptestReport elliptest(const ReturnPanel& p, const models::ModelSpec& null_model,
                          const mc::SeedSpec& seed, const ElliptestOptions& opts) {
    const std::vector<PairObservables> emp = pairscan(p, opts.scan);
    if (emp.size() < opts.n_bins)
        throw std::domain_error("elliptest: fewer usable pairs than bins");

    ElliptestReport rep;
    rep.n_pairs = emp.size();
    const mc::CorrelationMatrix corr = shrunk_corr(p, rep.shrinkage, rep.min_eigenvalue);

    std::vector<PairRow> sim;
    for (std::size_t r = 0; r < opts.n_reps; ++r) {
        const ReturnPanel sp =
            mc::sample_panel(corr, null_model, p.rows(), seed.substream(r + 1));
        for (const PairObservables& o : pairscan(sp, opts.scan))
            sim.push_back({o.rho, o.residual, o.z});
    }
    rep.n_sim_pairs = sim.size();

    std::vector<std::size_t> order(emp.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return emp[a].rho < emp[b].rho;
    });
    const std::vector<std::size_t> bd = bin_boundaries(emp.size(), opts.n_bins);
    // Interior edges midway between adjacent member boundaries; outer edges open.
    std::vector<double> edges(opts.n_bins + 1);
    edges.front() = -std::numeric_limits<double>::infinity();
    edges.back() = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < opts.n_bins; ++k)
        edges[k] = 0.5 * (emp[order[bd[k] - 1]].rho + emp[order[bd[k]]].rho);

    for (std::size_t k = 0; k < opts.n_bins; ++k) {
        ElliptestBin bin;
        std::vector<double> rho, res, z, sres, sz;
        for (std::size_t pos = bd[k]; pos < bd[k + 1]; ++pos) {
            const PairObservables& o = emp[order[pos]];
            rho.push_back(o.rho);
            res.push_back(o.residual);
            if (o.z) z.push_back(*o.z);
        }
        for (const PairRow& o : sim) {
            if (o.rho < edges[k] || o.rho >= edges[k + 1]) continue;
            sres.push_back(o.residual);
            if (o.z) sz.push_back(*o.z);
        }
        bin.rho_lo = rho.front();
        bin.rho_hi = rho.back();
        bin.rho_mean = vec_mean(rho);
        bin.count = rho.size();
        bin.resid = member_stat(res);
        bin.z = member_stat(z);
        bin.sim_resid = member_stat(sres);
        bin.sim_z = member_stat(sz);
        bin.resid_dispersion_ratio =
            bin.sim_resid.sd > 0 ? bin.resid.sd / bin.sim_resid.sd : kNaN;
        bin.z_dispersion_ratio = bin.sim_z.sd > 0 ? bin.z.sd / bin.sim_z.sd : kNaN;
        rep.bins.push_back(std::move(bin));
    }
    return rep;
}

}  // namespace depstat::panel
