#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depstat/estimators.hpp"
#include "depstat/rng.hpp"
#include "depstat/samplers.hpp"
#include "oracles.hpp"

using namespace depstat;

namespace {

est::PairSample random_pair_with_ties(std::uint64_t seed, std::size_t n) {
    mc::Rng rng({seed, 99}, 0);
    est::PairSample s;
    for (std::size_t i = 0; i < n; ++i) {
        // Coarse rounding manufactures plenty of ties.
        s.x.push_back(std::floor(rng.normal() * 4.0) / 4.0);
        s.y.push_back(std::floor((0.5 * s.x.back() + rng.normal()) * 4.0) / 4.0);
    }
    return s;
}

}  // namespace

TEST_CASE("rank transform basics") {
    const auto u = est::rank_transform(std::vector<double>{3.0, 1.0, 2.0});
    CHECK(u[0] == doctest::Approx(5.0 / 6.0));
    CHECK(u[1] == doctest::Approx(1.0 / 6.0));
    CHECK(u[2] == doctest::Approx(0.5));

    const auto tied = est::rank_transform(std::vector<double>{1.0, 1.0, 2.0});
    CHECK(tied[0] == doctest::Approx(1.0 / 3.0));  // midrank 1.5
    CHECK(tied[1] == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(est::rank_transform(std::vector<double>{1.0, 1.0}),
                    est::DegenerateInput);
    CHECK_THROWS_AS(est::rank_transform(std::vector<double>{1.0}),
                    est::DegenerateInput);
}

TEST_CASE("rank transform is invariant under monotone maps") {
    mc::Rng rng({1, 0}, 0);
    std::vector<double> x(200), ex(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        ex[i] = std::exp(x[i]);
    }
    CHECK(est::rank_transform(x) == est::rank_transform(ex));
}

TEST_CASE("corr coefficients on degenerate configurations") {
    mc::Rng rng({2, 0}, 0);
    std::vector<double> x(500);
    for (auto& v : x) v = rng.normal();
    est::PairSample self{x, x};
    const auto c = est::corr_coeffs(self);
    CHECK(c.rho == doctest::Approx(1.0));
    CHECK(c.zeta1 == doctest::Approx(1.0));
    CHECK(c.zeta2 == doctest::Approx(1.0));
    CHECK(c.rho_sign == doctest::Approx(1.0));

    std::vector<double> nx(x.size());
    std::transform(x.begin(), x.end(), nx.begin(), std::negate<>());
    const auto a = est::corr_coeffs({x, nx});
    CHECK(a.rho == doctest::Approx(-1.0));
    CHECK(a.zeta1 == doctest::Approx(1.0));
    CHECK(a.zeta2 == doctest::Approx(1.0));
    CHECK(a.rho_sign == doctest::Approx(-1.0));

    CHECK_THROWS_AS(est::corr_coeffs({std::vector<double>(x.size(), 1.0), x}),
                    est::DegenerateInput);
}

TEST_CASE("empirical copula against the brute-force count") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = random_pair_with_ties(seed, 400);
        const auto up = est::rank_transform_pair(s);
        mc::Rng rng({seed, 5}, 0);
        for (int k = 0; k < 10; ++k) {
            const double p = rng.uniform(), q = rng.uniform();
            CHECK(est::empirical_copula(up, p, q) ==
                  oracle::empirical_copula(up.u, up.v, p, q));
        }
    }
    const est::UniformPair up{{0.25, 0.75}, {0.25, 0.75}};
    CHECK(est::empirical_copula(up, 1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(est::empirical_copula(up, 1.2, 0.5), std::domain_error);
}

TEST_CASE("copula diagonals equal the pointwise estimator") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = random_pair_with_ties(seed + 50, 700);
        const auto up = est::rank_transform_pair(s);
        std::vector<double> grid;
        mc::Rng rng({seed, 6}, 0);
        for (int k = 0; k < 25; ++k) grid.push_back(rng.uniform());
        const auto d = est::empirical_copula_diagonals(up, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            CHECK(d.diag[g] == oracle::empirical_copula(up.u, up.v, grid[g], grid[g]));
            CHECK(d.anti[g] ==
                  oracle::empirical_copula(up.u, up.v, grid[g], 1.0 - grid[g]));
        }
    }
}

TEST_CASE("kendall tau equals the O(T^2) count, ties included") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto s = random_pair_with_ties(seed + 100, 300);
        CHECK(est::kendall_tau(s.x, s.y) ==
              doctest::Approx(oracle::kendall_tau(s.x, s.y)).epsilon(1e-13));
    }
    std::vector<double> inc(100), dec(100);
    std::iota(inc.begin(), inc.end(), 0.0);
    std::reverse_copy(inc.begin(), inc.end(), dec.begin());
    CHECK(est::kendall_tau(inc, inc) == doctest::Approx(1.0));
    CHECK(est::kendall_tau(inc, dec) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(est::kendall_tau(std::vector<double>(inc.size(), 1.0), inc),
                    est::DegenerateInput);
}

TEST_CASE("tail dependence corners") {
    std::vector<double> inc(1000);
    std::iota(inc.begin(), inc.end(), 0.0);
    std::vector<double> dec(inc.rbegin(), inc.rend());
    const auto co = est::rank_transform_pair({inc, inc});
    const auto anti = est::rank_transform_pair({inc, dec});
    CHECK(est::tail_dependence(co, 0.95, est::TailCorner::UU).value ==
          doctest::Approx(1.0).epsilon(0.05));
    CHECK(est::tail_dependence(anti, 0.95, est::TailCorner::UU).value ==
          doctest::Approx(0.0));
    CHECK(est::tail_dependence(anti, 0.95, est::TailCorner::UL).value ==
          doctest::Approx(1.0).epsilon(0.05));
    // tau_UL(x,y) = tau_LU(y,x)
    const auto s = random_pair_with_ties(7, 600);
    const auto up = est::rank_transform_pair(s);
    const est::UniformPair swapped{up.v, up.u};
    CHECK(est::tail_dependence(up, 0.9, est::TailCorner::UL).value ==
          doctest::Approx(
              est::tail_dependence(swapped, 0.9, est::TailCorner::LU).value));
    // Sparse-sample warning.
    CHECK(est::tail_dependence(up, 0.999, est::TailCorner::UU).sparse_warning);
    CHECK_FALSE(est::tail_dependence(up, 0.9, est::TailCorner::UU).sparse_warning);
}

TEST_CASE("central copula point") {
    std::vector<double> inc(999);
    std::iota(inc.begin(), inc.end(), 0.0);
    const auto co = est::rank_transform_pair({inc, inc});
    // Strict inequality excludes the exact median point of an odd series.
    CHECK(est::cstar(co) == doctest::Approx(499.0 / 999.0));
    const auto s = random_pair_with_ties(3, 500);
    const auto up = est::rank_transform_pair(s);
    CHECK(est::cstar(up) == est::empirical_copula(up, 0.499999999, 0.499999999));
}

TEST_CASE("copula profile identities") {
    const auto s = mc::sample_elliptical_pair(models::ModelSpec::gaussian(), 0.4,
                                              200000, {21, 0});
    const auto up = est::rank_transform_pair(s);
    const double rho = est::corr_coeffs(s).rho;
    std::vector<double> grid{0.1, 0.25, 0.5, 0.75, 0.9};
    const auto prof = est::copula_profile(up, grid, est::RhoRefPolicy::Pearson, rho);
    CHECK(prof.rho_ref == rho);
    // Self-referenced gaussian data: profile consistent with zero.
    for (std::size_t g = 0; g < grid.size(); ++g) {
        CHECK(std::abs(prof.delta_diag[g]) < 0.02);
        CHECK(std::abs(prof.delta_anti[g]) < 0.02);
    }
    // At p = 1/2 the diagonal and anti-diagonal are the same quantity.
    CHECK(prof.delta_diag[2] == doctest::Approx(prof.delta_anti[2]).epsilon(1e-12));
    // Kendall-implied reference for elliptical data agrees with Pearson rho.
    const auto prof2 =
        est::copula_profile(up, grid, est::RhoRefPolicy::KendallImplied, rho);
    CHECK(prof2.rho_ref == doctest::Approx(rho).epsilon(0.02));
}

TEST_CASE("default profile grid") {
    const auto g = est::default_profile_grid();
    CHECK(g.size() == 99);
    CHECK(g.front() == doctest::Approx(0.01));
    CHECK(g.back() == doctest::Approx(0.99));
    CHECK(g[49] == 0.5);
}
