#include "depstat/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depstat/special.hpp"

namespace depstat::est {

namespace {
constexpr double kPi = 3.14159265358979323846;

double pearson(std::span<const double> a, std::span<const double> b,
               const char* what) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        throw DegenerateInput(std::string("zero variance in ") + what);
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

std::vector<double> rank_transform(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw DegenerateInput("rank_transform: need at least 2 observations");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> u(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        // midrank of the tie block [i, j] (1-based ranks)
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k)
            u[idx[k]] = (midrank - 0.5) / static_cast<double>(n);
        i = j + 1;
    }
    if (u[idx[0]] == u[idx[n - 1]])
        throw DegenerateInput("rank_transform: constant series");
    return u;
}

UniformPair rank_transform_pair(const PairSample& pair) {
    if (pair.x.size() != pair.y.size())
        throw std::domain_error("rank_transform_pair: length mismatch");
    return {rank_transform(pair.x), rank_transform(pair.y)};
}

CorrCoeffs corr_coeffs(const PairSample& pair) {
    const std::size_t n = pair.size();
    if (n < 2 || pair.y.size() != n)
        throw std::domain_error("corr_coeffs: need an aligned pair of length >= 2");
    CorrCoeffs out{};
    out.rho = pearson(pair.x, pair.y, "raw returns (d=1)");

    std::vector<double> ax(n), ay(n), sx2(n), sy2(n);
    for (std::size_t i = 0; i < n; ++i) {
        ax[i] = std::abs(pair.x[i]);
        ay[i] = std::abs(pair.y[i]);
        sx2[i] = pair.x[i] * ax[i];  // sign(x) * |x|^2
        sy2[i] = pair.y[i] * ay[i];
    }
    out.zeta1 = pearson(ax, ay, "absolute values (d=1)");
    std::vector<double> qx(n), qy(n);
    for (std::size_t i = 0; i < n; ++i) {
        qx[i] = ax[i] * ax[i];
        qy[i] = ay[i] * ay[i];
    }
    out.zeta2 = pearson(qx, qy, "squares (d=2)");
    out.rho2 = pearson(sx2, sy2, "signed squares (d=2)");

    // Sign correlation: rows with an exact zero in either series are dropped.
    std::vector<double> gx, gy;
    gx.reserve(n);
    gy.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (pair.x[i] != 0.0 && pair.y[i] != 0.0) {
            gx.push_back(pair.x[i] > 0.0 ? 1.0 : -1.0);
            gy.push_back(pair.y[i] > 0.0 ? 1.0 : -1.0);
        }
    }
    if (gx.size() < 2) throw DegenerateInput("zero variance in signs (d=0)");
    out.rho_sign = pearson(gx, gy, "signs (d=0)");
    return out;
}

double empirical_copula(const UniformPair& up, double p, double q) {
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
        throw std::domain_error("empirical_copula: p, q must lie in [0, 1]");
    const std::size_t n = up.size();
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (up.u[i] <= p && up.v[i] <= q) ++count;
    return static_cast<double>(count) / static_cast<double>(n);
}

namespace {

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t i) {
        for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
    }
    // count of inserted indices <= i
    std::size_t prefix(std::size_t i) const {
        std::size_t s = 0;
        for (++i; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

private:
    std::vector<std::size_t> tree_;
};

}  // namespace

DiagonalCounts empirical_copula_diagonals(const UniformPair& up,
                                          std::span<const double> grid) {
    const std::size_t n = up.size();
    // Compress v-values to ranks.
    std::vector<double> vs(up.v.begin(), up.v.end());
    std::sort(vs.begin(), vs.end());
    const auto vrank_le = [&](double q) {
        return static_cast<std::size_t>(
            std::upper_bound(vs.begin(), vs.end(), q) - vs.begin());
    };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return up.u[a] < up.u[b]; });

    std::vector<std::size_t> gidx(grid.size());
    std::iota(gidx.begin(), gidx.end(), 0);
    std::sort(gidx.begin(), gidx.end(),
              [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });

    Fenwick fw(n);
    DiagonalCounts out;
    out.diag.resize(grid.size());
    out.anti.resize(grid.size());
    std::size_t ptr = 0;
    for (std::size_t g : gidx) {
        const double p = grid[g];
        while (ptr < n && up.u[order[ptr]] <= p) {
            const std::size_t vr = static_cast<std::size_t>(
                std::lower_bound(vs.begin(), vs.end(), up.v[order[ptr]]) - vs.begin());
            fw.add(vr);
            ++ptr;
        }
        const std::size_t le_p = vrank_le(p);
        const std::size_t le_q = vrank_le(1.0 - p);
        out.diag[g] = le_p == 0 ? 0.0
                                : static_cast<double>(fw.prefix(le_p - 1)) / n;
        out.anti[g] = le_q == 0 ? 0.0
                                : static_cast<double>(fw.prefix(le_q - 1)) / n;
    }
    return out;
}

TailEstimate tail_dependence(const UniformPair& up, double p, TailCorner corner) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("tail_dependence: p must lie in (0, 1)");
    const double T = static_cast<double>(up.size());
    double val = 0.0;
    switch (corner) {
        case TailCorner::UU:
            val = (1.0 - 2.0 * p + empirical_copula(up, p, p)) / (1.0 - p);
            break;
        case TailCorner::LL:
            val = empirical_copula(up, 1.0 - p, 1.0 - p) / (1.0 - p);
            break;
        case TailCorner::UL:
            val = (1.0 - p - empirical_copula(up, p, 1.0 - p)) / (1.0 - p);
            break;
        case TailCorner::LU:
            val = (1.0 - p - empirical_copula(up, 1.0 - p, p)) / (1.0 - p);
            break;
    }
    return {std::clamp(val, 0.0, 1.0), T * (1.0 - p) < 5.0};
}

double cstar(const UniformPair& up) {
    const std::size_t n = up.size();
    if (n == 0) throw DegenerateInput("cstar: empty pair");
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (up.u[i] < 0.5 && up.v[i] < 0.5) ++count;
    return static_cast<double>(count) / static_cast<double>(n);
}

namespace {

// Counts swaps needed to sort y (merge sort), i.e. discordant-ish pairs.
std::uint64_t merge_count(std::vector<double>& y, std::vector<double>& buf,
                          std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = merge_count(y, buf, lo, mid) + merge_count(y, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (y[j] < y[i]) {
            swaps += mid - i;
            buf[k++] = y[j++];
        } else {
            buf[k++] = y[i++];
        }
    }
    while (i < mid) buf[k++] = y[i++];
    while (j < hi) buf[k++] = y[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, y.begin() + lo);
    return swaps;
}

std::uint64_t tie_pairs(std::span<const double> sorted) {
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const std::uint64_t m = j - i + 1;
        total += m * (m - 1) / 2;
        i = j + 1;
    }
    return total;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::domain_error("kendall_tau: need an aligned pair of length >= 2");
    // Knight's algorithm: sort by (x, y), count ties, then count exchanges
    // while sorting y.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x[idx[i]];
    const std::uint64_t n1 = tie_pairs(xs);
    // joint ties (tied in both x and y)
    std::uint64_t n3 = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && xs[j + 1] == xs[i] && ys[j + 1] == ys[i]) ++j;
            const std::uint64_t m = j - i + 1;
            n3 += m * (m - 1) / 2;
            i = j + 1;
        }
    }
    std::vector<double> ybuf(ys), tmp(n);
    const std::uint64_t swaps = merge_count(ybuf, tmp, 0, n);
    const std::uint64_t n2 = tie_pairs(ybuf);  // ybuf now sorted
    if (n1 == n0 || n2 == n0) throw DegenerateInput("kendall_tau: all-tied series");

    // P - Q = n0 - n1 - n2 + n3 - 2*swaps
    const double pq = static_cast<double>(n0) - static_cast<double>(n1) -
                      static_cast<double>(n2) + static_cast<double>(n3) -
                      2.0 * static_cast<double>(swaps);
    const double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                         std::sqrt(static_cast<double>(n0 - n2));
    return std::clamp(pq / denom, -1.0, 1.0);
}

CopulaProfile copula_profile(const UniformPair& up, std::span<const double> grid,
                             RhoRefPolicy policy, double pearson_rho,
                             const num::QuadratureSpec& q) {
    CopulaProfile out;
    out.p_grid.assign(grid.begin(), grid.end());
    out.rho_ref = policy == RhoRefPolicy::Pearson
                      ? pearson_rho
                      : std::sin(0.5 * kPi * kendall_tau(up));
    const DiagonalCounts counts = empirical_copula_diagonals(up, grid);
    out.delta_diag.resize(grid.size());
    out.delta_anti.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = grid[i];
        const double norm = p * (1.0 - p);
        out.delta_diag[i] =
            (counts.diag[i] - num::gaussian_copula(p, p, out.rho_ref, q)) / norm;
        out.delta_anti[i] =
            (counts.anti[i] - num::gaussian_copula(p, 1.0 - p, out.rho_ref, q)) / norm;
    }
    return out;
}

std::vector<double> default_profile_grid() {
    std::vector<double> g;
    g.reserve(99);
    for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
    g[49] = 0.5;  // exact centre
    return g;
}

}  // namespace depstat::est
