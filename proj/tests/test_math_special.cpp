#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "evtail/math/special.hpp"

using namespace evtail::math;

TEST_CASE("normal cdf fixed points") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(norm_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(norm_cdf(-1.0) == doctest::Approx(1.0 - 0.8413447460685429).epsilon(1e-12));
    CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(norm_cdf(-8.0) > 0.0);
    CHECK(norm_cdf(8.0) < 1.0);
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double p : {1e-10, 1e-4, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
        CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).scale(1).epsilon(1e-13));
    CHECK_THROWS_AS(norm_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(norm_quantile(1.0), std::invalid_argument);
    CHECK_THROWS_AS(norm_quantile(-0.2), std::invalid_argument);
}

TEST_CASE("regularized lower gamma closed forms") {
    // P(1, x) = 1 - exp(-x)
    for (double x : {0.1, 1.0, 3.0, 10.0}) {
        CHECK(reg_lower_gamma(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
    }
    // P(1/2, x) = erf(sqrt(x))
    CHECK(reg_lower_gamma(0.5, 1.0) == doctest::Approx(std::erf(1.0)).epsilon(1e-12));
    CHECK(reg_lower_gamma(2.5, 0.0) == 0.0);
    // crosses the series/continued-fraction switch at x = a + 1
    CHECK(reg_lower_gamma(3.0, 3.9) + (1.0 - reg_lower_gamma(3.0, 3.9)) ==
          doctest::Approx(1.0));
}

TEST_CASE("chi-squared quantile matches closed forms and pins the 0.99/4 value") {
    CHECK(std::abs(chi2_quantile(0.99, 4) - 13.2767) < 0.01);
    CHECK(std::abs(chi2_quantile(0.5, 2) - 2.0 * std::log(2.0)) < 1e-6);
    CHECK(chi2_quantile(0.0, 7) == 0.0);
    CHECK(chi2_quantile(0.9, 4) < chi2_quantile(0.99, 4));
    // inverse property against the cdf
    for (int k : {1, 2, 5, 40}) {
        for (double p : {0.05, 0.5, 0.95, 0.99}) {
            CHECK(chi2_cdf(chi2_quantile(p, k), k) == doctest::Approx(p).epsilon(1e-7));
        }
    }
    CHECK_THROWS_AS(chi2_quantile(1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(chi2_quantile(-0.1, 4), std::invalid_argument);
    CHECK_THROWS_AS(chi2_quantile(0.5, 0), std::invalid_argument);
}

TEST_CASE("splitmix64 is deterministic and spreads nearby inputs") {
    CHECK(splitmix64(42) == splitmix64(42));
    CHECK(splitmix64(42) != splitmix64(43));
    CHECK(splitmix64(0) != 0);
}
