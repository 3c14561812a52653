#pragma once

#include <cstdint>

namespace evtail::math {

// Standard normal CDF, accurate to full double precision via erfc.
double norm_cdf(double z);

// Standard normal quantile. Rational initial guess refined by one
// Halley step against norm_cdf; |error| < 1e-13 over (1e-300, 1-1e-16).
// Throws std::invalid_argument unless 0 < p < 1.
double norm_quantile(double p);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a+1, Lentz continued fraction otherwise.
double reg_lower_gamma(double a, double x);

// Chi-squared CDF with k > 0 degrees of freedom.
double chi2_cdf(double x, int k);

// Chi-squared quantile, inverted from reg_lower_gamma by bisection to
// absolute 1e-10. Throws std::invalid_argument for p outside [0, 1)
// or k < 1. chi2_quantile(0, k) == 0.
double chi2_quantile(double p, int k);

// SplitMix64 finalizer; used to derive independent per-segment seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace evtail::math
