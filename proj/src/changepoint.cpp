#include "evtail/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evtail/errors.hpp"
#include "evtail/math/special.hpp"

namespace evtail {

DevianceResult deviance_test(double loglik_ns, double loglik_s, int k, double alpha) {
    if (k < 1) {
        throw std::invalid_argument("deviance: k must be >= 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("deviance: alpha must lie in (0, 1)");
    }
    if (!std::isfinite(loglik_ns) || !std::isfinite(loglik_s)) {
        throw std::invalid_argument("deviance: log likelihoods must be finite");
    }
    DevianceResult res;
    res.d = 2.0 * (loglik_ns - loglik_s);
    res.c_alpha = math::chi2_quantile(1.0 - alpha, k);
    res.alpha = alpha;
    res.k = k;
    res.reject_stationary = res.d > res.c_alpha;
    return res;
}

DevianceResult deviance_from_segments(std::span<const double> segment_logliks,
                                      double stationary_loglik, double alpha) {
    if (segment_logliks.size() < 2) {
        throw std::invalid_argument("deviance: need at least 2 segments");
    }
    double total = 0.0;
    for (const double ll : segment_logliks) {
        total += ll;
    }
    const int k = 2 * (static_cast<int>(segment_logliks.size()) - 1);
    return deviance_test(total, stationary_loglik, k, alpha);
}

ChangePointModel fit_changepoint(const PowerTrace& trace, const GroupSegmentation& seg,
                                 const std::map<std::string, DeclusterConfig>& choices) {
    if (seg.groups.empty()) {
        throw std::invalid_argument("changepoint: empty segmentation");
    }
    ChangePointModel model;
    model.total_loglik = 0.0;
    model.complexity = 0;

    for (const auto& runs : seg.groups) {
        const auto it = choices.find(runs.label);
        if (it == choices.end()) {
            throw std::invalid_argument("changepoint: no threshold choice for group \"" +
                                        runs.label + "\"");
        }
        const std::vector<double> xs = group_powers(trace, runs);

        ClusterMinima clusters;
        try {
            clusters = decluster(xs, it->second);
        } catch (const AnalysisError&) {
            throw AnalysisError("group \"" + runs.label + "\": no sample below threshold");
        }
        std::vector<double> y(clusters.minima.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = it->second.u() - clusters.minima[i];
        }

        GpdFit fit;
        try {
            fit = gpd_fit_mle(y, it->second.u());
        } catch (const AnalysisError& e) {
            throw AnalysisError("group \"" + runs.label + "\": " + e.what());
        }

        model.segments.push_back(
            {runs.label, fit.u, fit.sigma, fit.xi, fit.loglik, fit.n_exceedances});
        model.total_loglik += fit.loglik;
        model.complexity += 2;
    }
    return model;
}

ParamTriple theta_at(const ChangePointModel& model, const GroupSegmentation& seg,
                     const PowerTrace& trace, std::int64_t t) {
    if (trace.empty() || t < trace.t_ms.front() || t > trace.t_ms.back()) {
        throw std::out_of_range("theta_at: t outside the trace time span");
    }
    // owning sample: last index with t_ms <= t
    const auto it = std::upper_bound(trace.t_ms.begin(), trace.t_ms.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - trace.t_ms.begin()) - 1;
    const std::uint32_t id = trace.group_id[idx];

    for (const auto& runs : seg.groups) {
        if (runs.id != id) {
            continue;
        }
        for (const auto& s : model.segments) {
            if (s.label == runs.label) {
                return {s.u, s.sigma, s.xi};
            }
        }
        throw std::out_of_range("theta_at: no segment model for group \"" + runs.label + "\"");
    }
    throw std::out_of_range("theta_at: sample group missing from segmentation");
}

}  // namespace evtail
