#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace evtail {

// Generalized Pareto parameters for lower-tail exceedances y = u - x > 0.
// sigma must be positive and finite; xi = 0 selects the exponential
// limit. Support is [0, inf) for xi >= 0 and [0, -sigma/xi] for xi < 0.
struct GpdParams {
    GpdParams(double sigma_, double xi_);
    double sigma;
    double xi;
};

// H(y) = 1 - (1 + xi*y/sigma)^(-1/xi); exponential limit when |xi| is
// below 1e-6. y must be >= 0. Clamps to 1 above a finite upper endpoint.
double gpd_cdf(double y, const GpdParams& params);

// Inverse of gpd_cdf on [0, 1); throws std::invalid_argument otherwise.
double gpd_quantile(double p, const GpdParams& params);

// Sum of log densities. Returns -infinity when any y lies outside the
// support (no exception: optimizers probe infeasible parameters).
double gpd_loglik(const GpdParams& params, std::span<const double> y);

// Analytic gradient of gpd_loglik: {d/dsigma, d/dxi}.
std::array<double, 2> gpd_loglik_grad(const GpdParams& params, std::span<const double> y);

struct GpdFit {
    double sigma;
    double xi;
    double u;             // threshold the exceedances were taken at
    double loglik;
    std::size_t n_exceedances;
    bool converged;
};

// Maximum likelihood fit by Nelder-Mead over (log sigma, xi), started
// from moment estimates, xi constrained to [-0.99, 2]. Requires at least
// 10 exceedances with nonzero spread (AnalysisError otherwise). u is
// recorded in the result untouched.
GpdFit gpd_fit_mle(std::span<const double> y, double u = 0.0);

}  // namespace evtail
