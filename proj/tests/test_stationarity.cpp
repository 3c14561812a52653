#include "evtail/stationarity.hpp"

#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "evtail/errors.hpp"
#include "support/oracles.hpp"

using evtail::AdfResult;
using evtail::AnalysisError;
using evtail::adf_critical_value;
using evtail::adf_test;
using evtail::schwert_lag;

namespace {

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed, double x0 = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(n);
    double prev = x0;
    for (auto& v : x) {
        prev = phi * prev + gauss(rng);
        v = prev;
    }
    return x;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(n);
    double acc = 0.0;
    for (auto& v : x) {
        acc += gauss(rng);
        v = acc;
    }
    return x;
}

}  // namespace

TEST_CASE("schwert lag rule") {
    CHECK(schwert_lag(100) == 12);
    CHECK(schwert_lag(2000) == 25);
    CHECK(schwert_lag(50) == 10);
    CHECK(schwert_lag(1000000) == 120);
}

TEST_CASE("critical value table lookups") {
    // exact rows: n_obs + 1 equals a tabulated walk length
    CHECK(adf_critical_value(24, 0.05) == doctest::Approx(-2.99691).epsilon(1e-12));
    CHECK(adf_critical_value(49, 0.05) == doctest::Approx(-2.92614).epsilon(1e-12));
    CHECK(adf_critical_value(99, 0.01) == doctest::Approx(-3.50259).epsilon(1e-12));
    CHECK(adf_critical_value(499, 0.10) == doctest::Approx(-2.57171).epsilon(1e-12));

    // huge samples sit on the asymptotic row, near the textbook -2.86
    CHECK(adf_critical_value(1000000, 0.05) == doctest::Approx(-2.86384).epsilon(1e-3));

    // below the smallest tabulated length the table clamps
    CHECK(adf_critical_value(5, 0.05) == doctest::Approx(-2.99691).epsilon(1e-12));

    // interpolation stays between the bracketing rows
    const double mid = adf_critical_value(66, 0.05);
    CHECK(mid > -2.92614);
    CHECK(mid < -2.89189);

    // tighter significance means a deeper critical value
    for (std::size_t n : {30u, 80u, 300u, 5000u}) {
        CHECK(adf_critical_value(n, 0.01) < adf_critical_value(n, 0.05));
        CHECK(adf_critical_value(n, 0.05) < adf_critical_value(n, 0.10));
    }

    CHECK_THROWS_AS(adf_critical_value(100, 0.07), std::invalid_argument);
}

TEST_CASE("regression matches a dense OLS oracle") {
    const auto x = ar1(0.6, 240, 913);
    const int p = 3;
    const auto fit = evtail::detail::adf_fit(x, p);

    // response d[t] on {1, x[t-1], d[t-1..t-p]} for t in [p+1, N-1]
    const std::size_t n_resp = x.size() - 1 - static_cast<std::size_t>(p);
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(p) + 2,
                                          std::vector<double>(n_resp));
    std::vector<double> y(n_resp);
    for (std::size_t i = 0; i < n_resp; ++i) {
        const std::size_t t = i + static_cast<std::size_t>(p) + 1;
        y[i] = x[t] - x[t - 1];
        cols[0][i] = 1.0;
        cols[1][i] = x[t - 1];
        for (int j = 1; j <= p; ++j) {
            cols[static_cast<std::size_t>(1 + j)][i] =
                x[t - static_cast<std::size_t>(j)] - x[t - static_cast<std::size_t>(j) - 1];
        }
    }
    const auto ref = oracle::ols_dense(cols, y);

    CHECK(fit.n_obs == n_resp);
    CHECK(fit.beta == doctest::Approx(ref.beta[1]).epsilon(1e-8));
    CHECK(fit.se == doctest::Approx(ref.se[1]).epsilon(1e-7));
    CHECK(fit.statistic == doctest::Approx(ref.beta[1] / ref.se[1]).epsilon(1e-7));
}

TEST_CASE("normal equations are solved to orthogonality") {
    const auto x = ar1(0.5, 3000, 77);
    const auto fit = evtail::detail::adf_fit(x, schwert_lag(x.size()));
    CHECK(fit.max_xte_over_n < 1e-6);
}

TEST_CASE("statistic is invariant under level shifts") {
    const auto x = ar1(0.4, 500, 2024);
    auto shifted = x;
    for (auto& v : shifted) {
        v += 100.0;
    }
    const auto a = adf_test(x);
    const auto b = adf_test(shifted);
    CHECK(std::fabs(a.statistic - b.statistic) < 1e-8);
    CHECK(a.lags == b.lags);
}

TEST_CASE("degenerate inputs") {
    std::vector<double> flat(64, -31.5);
    CHECK_THROWS_WITH_AS(adf_test(flat), doctest::Contains("zero variance"), AnalysisError);

    std::vector<double> tiny{1.0, 2.0, 1.5};
    CHECK_THROWS_WITH_AS(adf_test(tiny), doctest::Contains("too short"), AnalysisError);

    const auto x = ar1(0.3, 100, 5);
    CHECK_THROWS_AS(adf_test(x, std::nullopt, 0.07), std::invalid_argument);
    CHECK_THROWS_AS(adf_test(x, -1), std::invalid_argument);

    // Schwert order for 20 samples leaves too few observations, but a
    // small explicit cap fits
    const auto small = ar1(0.3, 20, 6);
    CHECK_THROWS_AS(adf_test(small), AnalysisError);
    CHECK_NOTHROW(adf_test(small, 2));
}

TEST_CASE("result fields are internally consistent") {
    const auto x = ar1(0.5, 2000, 31);
    const auto res = adf_test(x, 3, 0.01);
    CHECK(res.lags == 3);
    CHECK(res.significance == 0.01);
    CHECK(res.critical_value ==
          doctest::Approx(adf_critical_value(x.size() - 1 - 3, 0.01)).epsilon(1e-12));
    CHECK(res.reject_unit_root == (res.statistic < res.critical_value));

    const auto dflt = adf_test(x);
    CHECK(dflt.lags == schwert_lag(x.size()));
}

TEST_CASE("random walks keep the unit root") {
    int rejected = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        if (adf_test(random_walk(2000, seed)).reject_unit_root) {
            ++rejected;
        }
    }
    // 5% size, so 10 trials should almost never see more than two rejections
    CHECK(rejected <= 2);
}

TEST_CASE("stationary AR(1) is detected") {
    int rejected = 0;
    for (std::uint64_t seed = 101; seed <= 110; ++seed) {
        if (adf_test(ar1(0.5, 2000, seed)).reject_unit_root) {
            ++rejected;
        }
    }
    CHECK(rejected >= 9);
}
