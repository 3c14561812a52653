#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace evtail {

// Candidate grid for the threshold scan: thresholds strictly descending
// (shallow to deep, at least 8 of them), run gaps ascending, all >= 1.
struct ScanGrid {
    std::vector<double> u_values;
    std::vector<int> r_values;

    // 40 thresholds from the 40th to the 0.1th percentile of the samples,
    // equally spaced in dBm; run gaps {1, 2, 4, 8, 12, 16, 24, 32}.
    static ScanGrid default_for(std::span<const double> samples);

    void validate() const;  // throws std::invalid_argument
};

// One populated scan cell. sigma_star = sigma - xi*u is the threshold-
// independent modified scale. The se_ fields are large-sample standard
// errors of the three curve estimates (delta method for sigma_star);
// the linearity screen uses them as its noise scale.
struct ScanCell {
    double mean_excess;
    double xi;
    double sigma;
    double sigma_star;
    double se_mean_excess;
    double se_xi;
    double se_sigma_star;
    std::size_t n_exceed;
};

// Suffix linearity summary for one run gap. u_star_* is the largest
// start u whose suffix (all populated cells at u' <= u) passes the
// linearity screen for that curve; u_feasible is the largest start
// where all three curves pass at once, which is never shallower than
// the per-curve minimum. Values are nullopt when no suffix qualifies.
struct LinearityRecord {
    int r;
    std::optional<double> u_star_mrl;
    std::optional<double> u_star_shape;
    std::optional<double> u_star_modscale;
    std::optional<double> u_feasible;
};

struct ThresholdScan {
    ScanGrid grid;
    // cells[ri][ui]; absent when fewer than 10 declustered exceedances
    // or the cell fit degenerates
    std::vector<std::vector<std::optional<ScanCell>>> cells;
};

struct ThresholdChoice {
    double u_opt;
    int r_opt;
    double r2_mrl;
    double r2_shape;
    double r2_modscale;
    bool feasible;
};

// Mean of (u - x) over samples strictly below u; AnalysisError when no
// sample lies below u.
double mean_excess(std::span<const double> samples, double u);

// R^2 of the least-squares line through the points; by convention 1.0
// for an exactly constant response. Needs at least 2 points.
double rsquared(std::span<const std::pair<double, double>> points);

// Declusters and fits every grid cell. n_threads <= 1 runs serially;
// cell results do not depend on the schedule.
ThresholdScan scan(std::span<const double> samples, const ScanGrid& grid,
                   unsigned n_threads = 1);

// Per-r suffix linearity screen over the three curves (MRL, shape,
// modified scale), evaluated on suffixes with at least min_points
// populated cells; see LinearityRecord. Each suffix is scored by the
// weighted residuals of its least-squares line, each cell weighted by
// its own standard error, so a curve that is affine to within the
// cells' noise passes even when the affine trend is flat, and a noisy
// cell is merely down-weighted rather than excusing misfit elsewhere.
std::vector<LinearityRecord> linearity_records(const ThresholdScan& scan, double r2_min,
                                               int min_points);

// Picks the shallowest feasible threshold over all run gaps (most data
// retained subject to the linearity screen): u_opt = max over r of the
// per-r feasible u, r_opt = the smallest r attaining it. feasible=false
// (never an exception) when no suffix qualifies at any r.
ThresholdChoice select_threshold(const ThresholdScan& scan, double r2_min = 0.95,
                                 int min_points = 5);

}  // namespace evtail
