#include "evtail/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evtail/errors.hpp"

namespace evtail {

namespace {

void finish(ProbabilityPlot& plot) {
    double mean_emp = 0.0;
    for (const auto& p : plot.points) {
        mean_emp += p.empirical;
    }
    mean_emp /= static_cast<double>(plot.points.size());

    double max_dev = 0.0, ss_res = 0.0, ss_tot = 0.0;
    for (const auto& p : plot.points) {
        const double d = p.model - p.empirical;
        max_dev = std::max(max_dev, std::fabs(d));
        ss_res += d * d;
        ss_tot += (p.empirical - mean_emp) * (p.empirical - mean_emp);
    }
    plot.max_abs_dev = max_dev;
    plot.r2_diag = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
}

}  // namespace

ProbabilityPlot pp_points(std::span<const double> exceedances, const GpdParams& params) {
    if (exceedances.size() < 2) {
        throw AnalysisError("pp plot: need at least 2 exceedances");
    }
    std::vector<double> y(exceedances.begin(), exceedances.end());
    for (const double yi : y) {
        if (!(yi >= 0.0)) {
            throw std::invalid_argument("pp plot: exceedances must be >= 0");
        }
    }
    std::sort(y.begin(), y.end());

    ProbabilityPlot plot;
    const double k1 = static_cast<double>(y.size()) + 1.0;
    plot.points.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double emp = static_cast<double>(i + 1) / k1;
        plot.points.push_back({emp, gpd_cdf(y[i], params)});
    }
    finish(plot);
    return plot;
}

ProbabilityPlot qq_points(std::span<const double> below_u, double u, const GpdParams& params) {
    if (below_u.size() < 2) {
        throw AnalysisError("qq plot: need at least 2 values");
    }
    std::vector<double> x(below_u.begin(), below_u.end());
    for (const double xi : x) {
        if (!(xi < u)) {
            throw std::invalid_argument("qq plot: values must lie below the threshold");
        }
    }
    // i-th largest raw value pairs with the i-th shallowest model quantile
    std::sort(x.begin(), x.end(), std::greater<>());

    ProbabilityPlot plot;
    const double k1 = static_cast<double>(x.size()) + 1.0;
    plot.points.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = static_cast<double>(i + 1) / k1;
        plot.points.push_back({x[i], u - gpd_quantile(p, params)});
    }
    // stored ascending in the empirical coordinate
    std::reverse(plot.points.begin(), plot.points.end());
    finish(plot);
    return plot;
}

ValidationSummary summarize_fit(const ProbabilityPlot& pp, const ProbabilityPlot& qq) {
    ValidationSummary s;
    s.pp_max_abs_dev = pp.max_abs_dev;
    s.pp_r2 = pp.r2_diag;
    s.qq_max_abs_dev = qq.max_abs_dev;
    s.qq_r2 = qq.r2_diag;
    s.validated = pp.r2_diag >= 0.98 && pp.max_abs_dev <= 0.05;
    return s;
}

}  // namespace evtail
