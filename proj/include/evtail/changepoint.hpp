#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evtail/decluster.hpp"
#include "evtail/gpd.hpp"
#include "evtail/trace.hpp"

namespace evtail {

// One external-factor group's tail model inside the change-point model.
struct SegmentModel {
    std::string label;
    double u;
    double sigma;
    double xi;
    double loglik;
    std::size_t n_exceed;
};

// Piecewise model with one GPD per group. complexity counts free
// parameters: 2 per segment (shape and scale).
struct ChangePointModel {
    std::vector<SegmentModel> segments;
    double total_loglik;
    int complexity;
};

struct DevianceResult {
    double d;          // 2 * (loglik_ns - loglik_s)
    double c_alpha;    // chi-squared quantile at 1 - alpha, k dof
    double alpha;
    int k;
    bool reject_stationary;
};

// Parameters in force at time t: (u, sigma, xi).
struct ParamTriple {
    double u;
    double sigma;
    double xi;
};

// Deviance test of the change-point model against the stationary one
// with k = complexity difference degrees of freedom. Throws
// std::invalid_argument for k < 1, alpha outside (0, 1), or non-finite
// log likelihoods.
DevianceResult deviance_test(double loglik_ns, double loglik_s, int k, double alpha = 0.01);

// Convenience for assembling reports: sums per-segment log likelihoods
// and tests against the stationary fit with k = 2*(M-1).
DevianceResult deviance_from_segments(std::span<const double> segment_logliks,
                                      double stationary_loglik, double alpha = 0.01);

// Fits one GPD per group at that group's (u, r) choice, pooling the
// group's samples across runs. Throws AnalysisError naming the group if
// it has no sample below u or too few declustered exceedances, and
// std::invalid_argument if choices misses a group.
ChangePointModel fit_changepoint(const PowerTrace& trace, const GroupSegmentation& seg,
                                 const std::map<std::string, DeclusterConfig>& choices);

// Model parameters governing timestamp t: the owning sample is the last
// one with t_sample <= t; its group's segment is looked up by label.
// Throws std::out_of_range for t outside [first, last] timestamp.
ParamTriple theta_at(const ChangePointModel& model, const GroupSegmentation& seg,
                     const PowerTrace& trace, std::int64_t t);

}  // namespace evtail
