#pragma once

#include <span>
#include <vector>

#include "evtail/gpd.hpp"

namespace evtail {

struct PlotPoint {
    double empirical;
    double model;
};

// Points ascending in the empirical coordinate. max_abs_dev is the
// largest |model - empirical|; r2_diag measures agreement against the
// diagonal, 1 - sum((model-emp)^2) / sum((emp-mean(emp))^2), and is not
// clamped (badly wrong models go negative).
struct ProbabilityPlot {
    std::vector<PlotPoint> points;
    double max_abs_dev;
    double r2_diag;
};

// Probability-probability plot: empirical i/(k+1) against the model CDF
// at the i-th smallest exceedance. Needs k >= 2.
ProbabilityPlot pp_points(std::span<const double> exceedances, const GpdParams& params);

// Quantile-quantile plot on the dBm scale: i-th largest below-threshold
// value against u - quantile(i/(k+1)). Needs k >= 2 values, all < u.
ProbabilityPlot qq_points(std::span<const double> below_u, double u, const GpdParams& params);

struct ValidationSummary {
    double pp_max_abs_dev;
    double pp_r2;
    double qq_max_abs_dev;
    double qq_r2;
    bool validated;  // pp_r2 >= 0.98 and pp_max_abs_dev <= 0.05
};

ValidationSummary summarize_fit(const ProbabilityPlot& pp, const ProbabilityPlot& qq);

}  // namespace evtail
