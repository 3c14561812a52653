#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evtail/changepoint.hpp"
#include "evtail/diagnostics.hpp"
#include "evtail/gpd.hpp"
#include "evtail/stationarity.hpp"
#include "evtail/threshold.hpp"
#include "evtail/trace.hpp"

namespace evtail {

struct AnalyzeOptions {
    double significance = 0.05;       // ADF level
    std::optional<int> max_lag;
    double alpha = 0.01;              // deviance level
    double r2_min = 0.95;
    int min_points = 5;
    std::optional<std::pair<double, double>> u_range;  // shallow, deep
    std::optional<int> u_count;
    std::optional<std::vector<int>> r_list;
    bool force_stationary = false;
    bool force_nonstationary = false;
    unsigned n_threads = 1;
};

// Full pipeline result for one sample set (a group or the whole trace).
struct TailAnalysis {
    std::string label;
    std::size_t n_samples = 0;
    ThresholdChoice threshold{};
    GpdFit fit{};
    ProbabilityPlot pp;
    ProbabilityPlot qq;
    ValidationSummary diag{};
};

struct AnalysisResult {
    std::string input_digest;          // fnv1a64 of the raw input bytes
    std::size_t n_samples = 0;
    std::int64_t t_first_ms = 0;
    std::int64_t t_last_ms = 0;

    AdfResult adf{};
    std::string adf_verdict;           // "stationary" | "non-stationary"
    std::string branch;                // verdict after force overrides
    bool forced = false;

    std::vector<std::pair<std::string, std::size_t>> group_sizes;

    TailAnalysis global;               // whole-trace pipeline (the
                                       // stationary competitor)
    ThresholdScan global_scan;
    std::vector<TailAnalysis> groups;  // non-stationary branch only

    std::optional<DevianceResult> deviance;
    std::string selected_model;        // "stationary" | "change-point"
    std::vector<std::string> warnings;
};

// Runs the full pipeline: ADF branch, threshold scan/selection, fits and
// diagnostics, and on the non-stationary branch the per-group models and
// deviance test. AnalysisError (exit 3 at the CLI) on infeasible
// selection, naming the offending group.
AnalysisResult run_analysis(const PowerTrace& trace, const AnalyzeOptions& opts);

// Grid for one sample set: the adaptive default unless opts overrides
// the thresholds (u_range/u_count) or run gaps (r_list).
ScanGrid build_scan_grid(std::span<const double> samples, const AnalyzeOptions& opts);

// report.json body; byte-identical across reruns on the same input.
std::string report_json(const AnalysisResult& result, std::string_view tool_version);

// CSV renderers. Headers are part of the interface:
//   scan:      u_dbm,r,mean_excess,xi,sigma,sigma_star,n_exceed
//   mrl:       u_dbm,r,mean_excess
//   stability: u_dbm,xi,sigma,sigma_star,n_exceed
//   plots:     empirical,model
std::string scan_csv(const ThresholdScan& scan);
std::string mrl_csv(const ThresholdScan& scan);
std::string stability_csv(const ThresholdScan& scan, int r);
std::string plot_csv(const ProbabilityPlot& plot);

// Per-r linearity summary: r,u_star_mrl,u_star_shape,u_star_modscale,u_feasible
// with empty fields where no suffix qualified.
std::string linearity_csv(const ThresholdScan& scan, double r2_min, int min_points);

// FNV-1a 64-bit, rendered as "fnv1a64:<16 hex digits>".
std::string fnv1a64_digest(std::string_view bytes);

// Rounds to 6 significant digits (dBm report convention).
double round_6sig(double v);


}  // namespace evtail
