#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace evtail {

// Augmented Dickey-Fuller result for the constant-only test equation
//   dx_t = alpha + beta*x_{t-1} + sum_{i=1..p} gamma_i*dx_{t-i} + e_t.
// The test is left-tailed: reject_unit_root == (statistic < critical_value),
// and rejecting the unit root means the series behaves as stationary.
struct AdfResult {
    double statistic;
    double critical_value;
    double significance;   // one of 0.01, 0.05, 0.10
    int lags;
    bool reject_unit_root;
};

// Schwert's rule p = floor(12 * (n/100)^(1/4)).
int schwert_lag(std::size_t n);

// Critical value interpolated in 1/N from the embedded Monte Carlo table
// (tools/df_table_oracle output); n_obs is the regression sample size.
double adf_critical_value(std::size_t n_obs, double significance);

// Runs the ADF test with lag order min(schwert_lag, max_lag if given).
// Throws AnalysisError for constant series ("zero variance") or series
// too short for the lag order; std::invalid_argument for a significance
// level outside {0.01, 0.05, 0.10}.
AdfResult adf_test(std::span<const double> series, std::optional<int> max_lag = std::nullopt,
                   double significance = 0.05);

namespace detail {

// Internals exposed for testing against a dense OLS oracle.
struct AdfFit {
    double statistic;
    double beta;            // lagged-level coefficient
    double se;
    std::size_t n_obs;
    int lags;
    double max_xte_over_n;  // max |X'e| / n, residual orthogonality
};

AdfFit adf_fit(std::span<const double> series, int p);

}  // namespace detail

}  // namespace evtail
