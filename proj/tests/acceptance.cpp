// Acceptance suite: one check per numbered criterion, each printing a single
// PASS/FAIL line with the measured values and pinned tolerances.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "depstat/estimators.hpp"
#include "depstat/models.hpp"
#include "depstat/panel.hpp"
#include "depstat/samplers.hpp"
#include "depstat/special.hpp"
#include "oracles.hpp"

using namespace depstat;

namespace {

int g_failures = 0;

void report(int idx, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s — %s\n", idx, ok ? "PASS" : "FAIL",
                detail.c_str());
    if (!ok) ++g_failures;
}

std::string f6(double v) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.6g", v);
    return b;
}

/// Full-sample statistic plus a block-resampled standard error (B blocks).
struct StatSe {
    double value;
    double se;
};

StatSe block_se(const est::PairSample& s,
                const std::function<double(const est::PairSample&)>& stat,
                std::size_t n_blocks) {
    const double full = stat(s);
    const std::size_t bs = s.size() / n_blocks;
    std::vector<double> vals;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        est::PairSample blk;
        blk.x.assign(s.x.begin() + b * bs, s.x.begin() + (b + 1) * bs);
        blk.y.assign(s.y.begin() + b * bs, s.y.begin() + (b + 1) * bs);
        vals.push_back(stat(blk));
    }
    const double m = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    double v = 0;
    for (double x : vals) v += (x - m) * (x - m);
    v /= double(vals.size() - 1);
    return {full, std::sqrt(v / double(vals.size()))};
}

double tail_uu(const est::PairSample& s, double p) {
    return est::tail_dependence(est::rank_transform_pair(s), p, est::TailCorner::UU)
        .value;
}

// ---- criteria ----

void criterion1() {
    const double beta = models::student_tail_beta(4.0, 0.3);
    const double corr = beta * std::pow(0.01, 2.0 / 4.0);
    const bool ok = std::abs(beta - 0.263) <= 0.003 && std::abs(corr - 0.026) <= 0.002;
    report(1, ok, "beta(4,0.3)=" + f6(beta) + " (0.263±0.003), correction(p=0.99)=" +
                      f6(corr) + " (0.026±0.002)");
}

void criterion2() {
    bool ok = models::student_tail_asymptote(5.0, 1.0) == 1.0 &&
              models::student_tail_asymptote(5.0, -1.0) == 0.0;
    double prev = 2.0;
    for (int nu = 3; nu <= 50; ++nu) {
        const double t = models::student_tail_asymptote(nu, 0.3);
        ok = ok && t < prev;
        prev = t;
    }
    const double t200 = models::student_tail_asymptote(200.0, 0.3);
    ok = ok && t200 < 0.01;
    report(2, ok, "tau*(5,±1) exact limits, decreasing over nu=3..50, tau*(200,0.3)=" +
                      f6(t200) + " < 0.01");
}

void criterion3() {
    double max_ratio = 0.0;
    for (double p : {0.99, 0.995, 0.999, 0.9995, 0.9999}) {
        const double exact =
            models::model_tail_exact(models::ModelSpec::student(5.0), 0.3, p,
                                     models::Corner::UU);
        const double expan = models::student_tail_expansion(5.0, 0.3, p);
        max_ratio = std::max(max_ratio,
                             std::abs(exact - expan) / std::pow(1.0 - p, 4.0 / 5.0));
    }
    bool ok = max_ratio < 5.0;  // bounded second-order coefficient

    const double p = 0.95;
    const double exact = models::model_tail_exact(models::ModelSpec::student(5.0), 0.3,
                                                  p, models::Corner::UU);
    std::string mc_detail;
    for (std::size_t T : {std::size_t(10000), std::size_t(1000000)}) {
        const auto s = mc::sample_elliptical_pair(models::ModelSpec::student(5.0), 0.3,
                                                  T, {301, T});
        const double est_tail = tail_uu(s, p);
        const double C = 1.0 - 2.0 * (1.0 - p) + exact * (1.0 - p);
        const double se = std::sqrt(C * (1.0 - C) / double(T)) / (1.0 - p);
        ok = ok && std::abs(est_tail - exact) < 3.0 * se;
        mc_detail += " T=" + std::to_string(T) + ": " + f6(est_tail) + "±" + f6(3 * se);
    }
    report(3, ok, "max |exact-expansion|/(1-p)^{4/nu}=" + f6(max_ratio) +
                      " (<5); exact(p=0.95)=" + f6(exact) + ";" + mc_detail);
}

// Mean and standard error across values from independent replicas. For the
// quadratic coefficient at nu=5 the per-sample estimator variance is driven by
// eighth moments that do not exist, so a within-sample block se badly
// understates the true sampling dispersion; averaging independent replicas and
// taking the spread between them measures that dispersion directly.
StatSe replica_mean_se(const std::vector<double>& vals) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (vals.size() - 1);
    return {mean, std::sqrt(var / vals.size())};
}

void criterion4() {
    bool ok = true;
    std::string detail;
    const std::size_t T = 1000000;
    const int R = 8;
    const models::ModelSpec s5 = models::ModelSpec::student(5.0);
    for (double rho : {0.0, 0.3, 0.7}) {
        const std::uint64_t base = std::uint64_t(rho * 10) * 100;
        const auto pred = models::elliptical_predictions(s5, rho);
        std::vector<double> v1, v2, vs, vc;
        for (int r = 0; r < R; ++r) {
            const auto s = mc::sample_elliptical_pair(
                s5, rho, T, {401, base + std::uint64_t(r)});
            const auto c = est::corr_coeffs(s);
            v1.push_back(c.zeta1);
            v2.push_back(c.zeta2);
            vs.push_back(c.rho_sign);
            vc.push_back(est::cstar(est::rank_transform_pair(s)));
        }
        const StatSe z1 = replica_mean_se(v1);
        const StatSe z2 = replica_mean_se(v2);
        const StatSe sg = replica_mean_se(vs);
        const StatSe cs = replica_mean_se(vc);
        const bool here = std::abs(z1.value - pred.zeta1) < 3 * z1.se &&
                          std::abs(z2.value - *pred.zeta2) < 3 * z2.se &&
                          std::abs(sg.value - pred.rho_sign) < 3 * sg.se &&
                          std::abs(cs.value - pred.cstar) < 3 * cs.se;
        ok = ok && here;
        detail += " rho=" + f6(rho) + (here ? " ok" : " FAIL") + " (zeta2 " +
                  f6(z2.value) + "±" + f6(3 * z2.se) + " vs " + f6(*pred.zeta2) + ")";
    }
    // Cross-family spot value: zeta2(rho=0) = 0.2 at nu=6.
    std::vector<double> v26;
    for (int r = 0; r < R; ++r) {
        const auto s = mc::sample_elliptical_pair(models::ModelSpec::student(6.0), 0.0,
                                                  T, {402, std::uint64_t(r)});
        v26.push_back(est::corr_coeffs(s).zeta2);
    }
    const StatSe z26 = replica_mean_se(v26);
    const bool cross = std::abs(z26.value - 0.2) < 3 * z26.se;
    ok = ok && cross;
    report(4, ok, "student nu=5 zeta1/zeta2/C*/rho_sign vs closed forms, 3-se over " +
                      std::to_string(R) + " replicas:" + detail + "; nu=6 zeta2(0)=" +
                      f6(z26.value) + "±" + f6(3 * z26.se) + " vs 0.2");
}

void criterion5() {
    const std::size_t T = 1000000;
    const double target = 0.25 + std::asin(0.3) / (2.0 * 3.14159265358979323846);
    const auto a = mc::sample_elliptical_pair(models::ModelSpec::student(5.0), 0.3, T,
                                              {501, 0});
    const auto b = mc::sample_elliptical_pair(models::ModelSpec::lognormal_vol(0.4),
                                              0.3, T, {502, 0});
    const double ca = est::cstar(est::rank_transform_pair(a));
    const double cb = est::cstar(est::rank_transform_pair(b));
    const double se = std::sqrt(target * (1.0 - target) / double(T));
    const bool ok = std::abs(ca - target) < 3 * se && std::abs(cb - target) < 3 * se &&
                    std::abs(ca - cb) < 3 * std::sqrt(2.0) * se;
    report(5, ok, "C* student=" + f6(ca) + ", lognormal=" + f6(cb) + ", analytic=" +
                      f6(target) + ", 3se=" + f6(3 * se));
}

void criterion6() {
    const std::size_t T = 1000000;
    const auto s = mc::sample_pseudo_elliptical_pair(0.4, 0.5, 0.4, T, {601, 0});
    const auto pred = models::pseudo_elliptical_predictions(0.4, 0.5, 0.4);
    const StatSe rho = block_se(
        s, [](const est::PairSample& b) { return est::corr_coeffs(b).rho; }, 100);
    const StatSe z1 = block_se(
        s, [](const est::PairSample& b) { return est::corr_coeffs(b).zeta1; }, 100);
    const StatSe z2 = block_se(
        s, [](const est::PairSample& b) { return est::corr_coeffs(b).zeta2; }, 100);
    const StatSe cs = block_se(
        s,
        [](const est::PairSample& b) { return est::cstar(est::rank_transform_pair(b)); },
        100);
    // C* follows the arcsin law in r (0.4), and is far from the arcsin law in
    // the measured rho.
    const double wrong_cstar =
        0.25 + std::asin(pred.rho) / (2.0 * 3.14159265358979323846);
    const bool ok = std::abs(rho.value - pred.rho) < 3 * rho.se &&
                    std::abs(z1.value - pred.zeta1) < 3 * z1.se &&
                    std::abs(z2.value - pred.zeta2) < 3 * z2.se &&
                    std::abs(cs.value - pred.cstar) < 3 * cs.se &&
                    std::abs(cs.value - wrong_cstar) > 3 * cs.se;
    report(6, ok, "pseudo(r=0.4,c=0.5,s=0.4): rho=" + f6(rho.value) + " vs " +
                      f6(pred.rho) + ", zeta1=" + f6(z1.value) + " vs " +
                      f6(pred.zeta1) + ", zeta2=" + f6(z2.value) + " vs " +
                      f6(pred.zeta2) + ", C*=" + f6(cs.value) + " vs " +
                      f6(pred.cstar) + " (arcsin in r, not rho)");
}

void criterion7() {
    bool ok = true;
    std::string detail;
    for (double theta : {1.0, 5.0}) {
        const std::size_t T = 500000;
        const auto s =
            mc::sample_archimedean_pair(models::Family::Frank, theta, T, {701, std::uint64_t(theta)});
        const double tau_exact =
            models::archimedean_kendall_tau(models::Family::Frank, theta);
        const StatSe tau = block_se(
            s, [](const est::PairSample& b) { return est::kendall_tau(b.x, b.y); }, 50);
        const bool here = std::abs(tau.value - tau_exact) < 3 * tau.se;
        ok = ok && here;
        detail += " frank(" + f6(theta) + "): " + f6(tau.value) + " vs " +
                  f6(tau_exact) + (here ? "" : " FAIL");
    }
    for (double theta : {0.3, 0.5, 0.8}) {
        const double t = models::model_tail_exact(models::ModelSpec::gumbel(theta), 0.0,
                                                  1.0 - 1e-6, models::Corner::UU);
        const double closed = 2.0 - std::pow(2.0, theta);
        const bool here = std::abs(t - closed) < 1e-3;
        ok = ok && here;
        detail += " gumbel(" + f6(theta) + "): " + f6(t) + " vs " + f6(closed) +
                  (here ? "" : " FAIL");
    }
    report(7, ok, "archimedean baselines:" + detail);
}

void criterion8() {
    const auto corr = mc::CorrelationMatrix::one_factor(50, 0.3);
    const auto p = mc::sample_panel(corr, models::ModelSpec::student(5.0), 2500,
                                    {801, 0});
    panel::ElliptestOptions opts;
    opts.n_bins = 10;
    opts.n_reps = 4;
    const auto rep = panel::elliptest(p, models::ModelSpec::student(5.0), {801, 100},
                                      opts);
    std::size_t within = 0;
    double min_ratio = 1e9, max_ratio = 0.0;
    for (const auto& b : rep.bins) {
        if (std::abs(b.resid.mean) <= 3.0 * b.resid.sd) ++within;
        min_ratio = std::min(min_ratio, b.resid_dispersion_ratio);
        max_ratio = std::max(max_ratio, b.resid_dispersion_ratio);
    }
    const bool ok = within >= 9 && min_ratio >= 0.8 && max_ratio <= 1.25;
    report(8, ok, "null calibration: " + std::to_string(within) +
                      "/10 bins within 3 dispersion-s.e. (>=9); dispersion ratios in [" +
                      f6(min_ratio) + ", " + f6(max_ratio) + "] (within [0.8, 1.25])");
}

void criterion9() {
    // Pseudo-elliptical panel: z curve pulled below zero.
    const auto pcorr = mc::CorrelationMatrix::one_factor(30, 0.3);
    const auto pp = mc::sample_panel(
        pcorr, models::ModelSpec::pseudo_elliptical(0.3, 0.5, 0.4), 150000, {901, 0});
    const auto scan = panel::pairscan(pp, {});
    const auto curve = panel::bin_by_rho(scan, 10);
    const auto& zlow = curve.stats[0][10];  // z column, lowest-rho bin
    const bool pseudo_ok = zlow.count > 0 && zlow.mean < 0.0 &&
                           std::abs(zlow.mean) >= 3.0 * zlow.sd;

    // Toy panel: within-pairs cluster at rho ~ 0 with a positive residual.
    const auto tp = mc::sample_panel(mc::CorrelationMatrix::identity(40),
                                     models::ModelSpec::two_factor_toy(0.0, 1.0),
                                     20000, {902, 0});
    const auto tscan = panel::pairscan(tp, {});
    const auto tcurve = panel::bin_by_rho(tscan, tscan.size() / 20);
    const auto& rlow = tcurve.stats[0][9];  // residual column, lowest-rho bin
    const double pred = std::sin(1.0 / 12.0);  // residual mapping of (k2-k1)/(24 pi)
    const bool toy_ok = rlow.mean > 0.0 && rlow.mean >= 3.0 * rlow.sd &&
                        std::abs(rlow.mean - pred) / pred <= 0.30;
    report(9, pseudo_ok && toy_ok,
           "pseudo(c=0.5) low-rho z = " + f6(zlow.mean) + " ± " + f6(zlow.sd) +
               " (< 0 by >=3 sd); toy low-rho residual = " + f6(rlow.mean) + " ± " +
               f6(rlow.sd) + " vs mapped prediction " + f6(pred) + " (" +
               f6(100.0 * std::abs(rlow.mean - pred) / pred) + "% rel.)");
}

void criterion10() {
    bool ok = true;
    mc::Rng meta({1001, 0}, 0);
    for (int rep = 0; rep < 100 && ok; ++rep) {
        const std::size_t T = 100 + std::size_t(meta.uniform() * 1900);
        mc::Rng rng({1001, std::uint64_t(rep + 1)}, 0);
        est::PairSample s;
        for (std::size_t t = 0; t < T; ++t) {
            s.x.push_back(std::floor(rng.normal() * 8.0) / 8.0);
            s.y.push_back(std::floor((0.4 * s.x.back() + rng.normal()) * 8.0) / 8.0);
        }
        const auto up = est::rank_transform_pair(s);
        for (int k = 0; k < 5; ++k) {
            const double p = meta.uniform(), q = meta.uniform();
            if (est::empirical_copula(up, p, q) !=
                oracle::empirical_copula(up.u, up.v, p, q))
                ok = false;
        }
        if (std::abs(est::kendall_tau(s.x, s.y) - oracle::kendall_tau(s.x, s.y)) >
            1e-12)
            ok = false;
        const double p = 0.9;
        const double brute =
            std::clamp((1.0 - 2.0 * p + oracle::empirical_copula(up.u, up.v, p, p)) /
                           (1.0 - p),
                       0.0, 1.0);
        if (est::tail_dependence(up, p, est::TailCorner::UU).value != brute) ok = false;
    }

    // Thread independence of the full pipeline output.
    const auto corr = mc::CorrelationMatrix::one_factor(12, 0.3);
    const auto p = mc::sample_panel(corr, models::ModelSpec::student(5.0), 600,
                                    {1002, 0});
    const auto serialize = [](const std::vector<panel::PairObservables>& rows) {
        std::string out;
        char buf[400];
        for (const auto& o : rows) {
            std::snprintf(buf, sizeof(buf), "%s|%s|%zu|%a|%a|%a|%a|%a|%a|%a|%a|%a|%a|%a|%a\n",
                          o.asset_i.c_str(), o.asset_j.c_str(), o.t_overlap, o.rho,
                          o.rho_sign, o.zeta1, o.zeta2, o.kendall, o.tau_uu, o.tau_ll,
                          o.tau_ul, o.tau_lu, o.cstar, o.residual,
                          o.z ? *o.z : -1e300);
            out += buf;
        }
        return out;
    };
    panel::ScanOptions o1{0.95, 250, 1}, o4{0.95, 250, 4}, omax{0.95, 250, 0};
    const std::string s1 = serialize(panel::pairscan(p, o1));
    ok = ok && s1 == serialize(panel::pairscan(p, o4)) &&
         s1 == serialize(panel::pairscan(p, omax));
    report(10, ok,
           "fast estimators == brute force on 100 pairs (T<=2000); pairscan "
           "byte-identical across threads {1,4,max}");
}

void criterion11() {
    bool ok = true;
    double worst = 0.0;
    for (double rho = -0.9; rho <= 0.9 + 1e-12; rho += 0.1) {
        const double target = 0.25 + std::asin(rho) / (2.0 * 3.14159265358979323846);
        worst = std::max(worst, std::abs(num::gaussian_copula(0.5, 0.5, rho) - target));
        worst = std::max(worst,
                         std::abs(num::student_copula(0.5, 0.5, rho, 5.0) - target));
    }
    ok = ok && worst < 1e-8;
    double rt = 0.0;
    for (double x = -5.5; x <= 5.5; x += 0.2)
        rt = std::max(rt, std::abs(num::gaussian_quantile(num::gaussian_cdf(x)) - x));
    ok = ok && rt < 1e-9;
    double rts = 0.0;
    for (double p = 0.001; p < 1.0; p += 0.02)
        rts = std::max(rts,
                       std::abs(num::student_cdf(num::student_quantile(p, 5.0), 5.0) - p));
    ok = ok && rts < 1e-9;
    report(11, ok, "copula C(1/2,1/2) identity max err " + f6(worst) +
                       " (<1e-8); gaussian quantile round-trip max err " + f6(rt) +
                       " (<1e-9, x-scale); student cdf round-trip max err " + f6(rts) +
                       " (<1e-9, p-scale)");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
