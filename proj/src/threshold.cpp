#include "evtail/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "evtail/decluster.hpp"
#include "evtail/errors.hpp"
#include "evtail/gpd.hpp"

namespace evtail {

namespace {

// Linear-interpolation percentile (q in [0, 100]); scratch is reused
// between calls and repartitioned in place, never fully sorted.
double percentile(std::vector<double>& scratch, double q) {
    const double pos = q / 100.0 * static_cast<double>(scratch.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto it = scratch.begin() + static_cast<std::ptrdiff_t>(lo);
    std::nth_element(scratch.begin(), it, scratch.end());
    if (lo + 1 >= scratch.size()) {
        return scratch.back();
    }
    const double next = *std::min_element(it + 1, scratch.end());
    const double frac = pos - static_cast<double>(lo);
    return scratch[lo] + frac * (next - scratch[lo]);
}

}  // namespace

ScanGrid ScanGrid::default_for(std::span<const double> samples) {
    if (samples.empty()) {
        throw std::invalid_argument("scan grid: no samples");
    }
    std::vector<double> scratch(samples.begin(), samples.end());
    const double hi = percentile(scratch, 40.0);
    const double lo = percentile(scratch, 0.1);
    ScanGrid grid;
    grid.u_values.resize(40);
    for (int i = 0; i < 40; ++i) {
        grid.u_values[static_cast<std::size_t>(i)] = hi + (lo - hi) * static_cast<double>(i) / 39.0;
    }
    grid.r_values = {1, 2, 4, 8, 12, 16, 24, 32};
    return grid;
}

void ScanGrid::validate() const {
    if (u_values.size() < 8) {
        throw std::invalid_argument("scan grid: need at least 8 thresholds");
    }
    for (std::size_t i = 1; i < u_values.size(); ++i) {
        if (!(u_values[i] < u_values[i - 1])) {
            throw std::invalid_argument("scan grid: thresholds must be strictly descending");
        }
    }
    if (r_values.empty()) {
        throw std::invalid_argument("scan grid: need at least one run gap");
    }
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        if (r_values[i] < 1 || (i > 0 && r_values[i] <= r_values[i - 1])) {
            throw std::invalid_argument("scan grid: run gaps must be ascending and >= 1");
        }
    }
}

double mean_excess(std::span<const double> samples, double u) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const double x : samples) {
        if (x < u) {
            sum += u - x;
            ++n;
        }
    }
    if (n == 0) {
        throw AnalysisError("mean excess: empty tail at threshold " + std::to_string(u));
    }
    return sum / static_cast<double>(n);
}

double rsquared(std::span<const std::pair<double, double>> points) {
    const std::size_t n = points.size();
    if (n < 2) {
        throw std::invalid_argument("rsquared: need at least 2 points");
    }
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (syy == 0.0) {
        return 1.0;  // constant response is perfectly linear
    }
    if (sxx == 0.0) {
        return 0.0;  // vertical stack of distinct responses
    }
    return (sxy * sxy) / (sxx * syy);
}

namespace {

std::optional<ScanCell> fit_cell(std::span<const double> samples, double u, int r) {
    ClusterMinima clusters;
    try {
        clusters = decluster(samples, DeclusterConfig(u, r));
    } catch (const AnalysisError&) {
        return std::nullopt;  // nothing below threshold
    }
    if (clusters.minima.size() < 10) {
        return std::nullopt;
    }
    std::vector<double> y(clusters.minima.size());
    double me = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = u - clusters.minima[i];
        me += y[i];
    }
    const double k = static_cast<double>(y.size());
    me /= k;
    double ss = 0.0;
    for (const double yi : y) {
        ss += (yi - me) * (yi - me);
    }
    const double se_me = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);

    try {
        const GpdFit fit = gpd_fit_mle(y, u);
        // large-sample MLE covariance: (1+xi)/k * [[2 sigma^2, sigma],
        // [sigma, 1+xi]]. That understates the finite-sample spread of
        // the shape estimate at small k, and badly so when xi-hat itself
        // is noise-driven, so two corrections calibrated on simulated
        // tails (xi in [-0.45, 0.1], k down to 25) are applied: a
        // multiplicative 1 + 8/sqrt(k), and an additive shape
        // uncertainty of 0.5*25/k that dominates wherever the cell is
        // too small for its own estimate to be trusted. Both fade to
        // nothing in well-populated cells.
        const double w = std::max(1.0 + fit.xi, 0.05);
        const double infl = 1.0 + 8.0 / std::sqrt(k);
        const double sd_small = 0.5 * 25.0 / k;
        const double se_xi = std::hypot(infl * w / std::sqrt(k), sd_small);
        const double var_star =
            (w / k) * (2.0 * fit.sigma * fit.sigma + u * u * w - 2.0 * u * fit.sigma);
        const double se_star =
            std::hypot(infl * std::sqrt(std::max(var_star, 0.0)), u * sd_small);
        return ScanCell{me,   fit.xi, fit.sigma, fit.sigma - fit.xi * u,
                        se_me, se_xi,  se_star,   y.size()};
    } catch (const AnalysisError&) {
        return std::nullopt;  // degenerate cell
    }
}

// One estimated curve point: threshold, value, squared standard error.
struct CurvePoint {
    double u;
    double y;
    double var;
};

// Wilson-Hilferty upper 5% point of chi-squared with nu dof; within a
// few parts in a thousand of the exact quantile for nu >= 3.
double chi2_q95(double nu) {
    const double z = 1.6448536269514722;
    const double a = 1.0 - 2.0 / (9.0 * nu) + z * std::sqrt(2.0 / (9.0 * nu));
    return nu * a * a * a;
}

// Linearity score of an estimated curve: the weighted least-squares
// line is fit with each point weighted by its inverse variance, and
// the weighted residual sum X^2 is compared with its chi-squared
// reference (n - 2 dof). The score is 1 - X^2 / (20 q95) clamped to
// [0, 1], so a curve that is affine to within its standard errors
// scores near 1, the pass bar of 0.95 sits exactly at the 95% point,
// and gross misfit decays to 0. A flat curve is affine, so a constant
// response scores 1; a point's noise only discounts its own residual,
// never another point's.
double screen_score(const std::vector<CurvePoint>& pts) {
    double sw = 0.0, su = 0.0, sy = 0.0;
    for (const auto& p : pts) {
        const double w = 1.0 / std::max(p.var, 1e-12);
        sw += w;
        su += w * p.u;
        sy += w * p.y;
    }
    const double mu = su / sw;
    const double my = sy / sw;
    double suu = 0.0, suy = 0.0, syy = 0.0;
    for (const auto& p : pts) {
        const double w = 1.0 / std::max(p.var, 1e-12);
        suu += w * (p.u - mu) * (p.u - mu);
        suy += w * (p.u - mu) * (p.y - my);
        syy += w * (p.y - my) * (p.y - my);
    }
    if (syy == 0.0) {
        return 1.0;  // constant response is perfectly linear
    }
    const double x2 =
        std::max(0.0, suu > 0.0 ? syy - suy * suy / suu : syy);
    const double q = chi2_q95(static_cast<double>(pts.size()) - 2.0);
    return std::clamp(1.0 - 0.05 * x2 / q, 0.0, 1.0);
}

}  // namespace

ThresholdScan scan(std::span<const double> samples, const ScanGrid& grid, unsigned n_threads) {
    grid.validate();
    if (samples.empty()) {
        throw std::invalid_argument("scan: no samples");
    }

    ThresholdScan out;
    out.grid = grid;
    const std::size_t nr = grid.r_values.size();
    const std::size_t nu = grid.u_values.size();
    out.cells.assign(nr, std::vector<std::optional<ScanCell>>(nu));

    const std::size_t total = nr * nu;
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const std::size_t ri = k / nu;
            const std::size_t ui = k % nu;
            out.cells[ri][ui] = fit_cell(samples, grid.u_values[ui], grid.r_values[ri]);
        }
    };

    if (n_threads <= 1) {
        run_range(0, total);
    } else {
        const unsigned workers = std::min<unsigned>(n_threads, 64);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (total + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min<std::size_t>(w * chunk, total);
            const std::size_t end = std::min<std::size_t>(begin + chunk, total);
            if (begin < end) {
                pool.emplace_back(run_range, begin, end);
            }
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return out;
}

std::vector<LinearityRecord> linearity_records(const ThresholdScan& scan, double r2_min,
                                               int min_points) {
    if (min_points < 2) {
        throw std::invalid_argument("linearity: min_points must be >= 2");
    }
    const auto& us = scan.grid.u_values;
    std::vector<LinearityRecord> records;
    records.reserve(scan.grid.r_values.size());

    for (std::size_t ri = 0; ri < scan.grid.r_values.size(); ++ri) {
        LinearityRecord rec;
        rec.r = scan.grid.r_values[ri];

        // walk candidate starts shallow-to-deep; the suffix at start k is
        // every populated cell at u <= u_k. The start cell itself must be
        // populated: the fit downstream reuses the winning (u, r), and a
        // start that falls in a gap of the scan would hand it a threshold
        // with too few clusters to fit (cluster counts are not monotone
        // in u, so a gap can sit above populated cells).
        for (std::size_t k = 0; k < us.size(); ++k) {
            if (!scan.cells[ri][k]) {
                continue;
            }
            std::vector<CurvePoint> mrl, shape, modscale;
            for (std::size_t j = k; j < us.size(); ++j) {
                if (const auto& cell = scan.cells[ri][j]) {
                    mrl.push_back({us[j], cell->mean_excess,
                                   cell->se_mean_excess * cell->se_mean_excess});
                    shape.push_back({us[j], cell->xi, cell->se_xi * cell->se_xi});
                    modscale.push_back(
                        {us[j], cell->sigma_star, cell->se_sigma_star * cell->se_sigma_star});
                }
            }
            if (mrl.size() < static_cast<std::size_t>(min_points)) {
                continue;  // deeper starts have even fewer points
            }
            const double r2m = screen_score(mrl);
            const double r2s = screen_score(shape);
            const double r2c = screen_score(modscale);
            if (!rec.u_star_mrl && r2m >= r2_min) {
                rec.u_star_mrl = us[k];
            }
            if (!rec.u_star_shape && r2s >= r2_min) {
                rec.u_star_shape = us[k];
            }
            if (!rec.u_star_modscale && r2c >= r2_min) {
                rec.u_star_modscale = us[k];
            }
            if (!rec.u_feasible && r2m >= r2_min && r2s >= r2_min && r2c >= r2_min) {
                rec.u_feasible = us[k];
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

ThresholdChoice select_threshold(const ThresholdScan& scan, double r2_min, int min_points) {
    const auto records = linearity_records(scan, r2_min, min_points);

    ThresholdChoice choice;
    choice.u_opt = std::numeric_limits<double>::quiet_NaN();
    choice.r_opt = 0;
    choice.r2_mrl = std::numeric_limits<double>::quiet_NaN();
    choice.r2_shape = std::numeric_limits<double>::quiet_NaN();
    choice.r2_modscale = std::numeric_limits<double>::quiet_NaN();
    choice.feasible = false;

    for (const auto& rec : records) {
        if (!rec.u_feasible) {
            continue;
        }
        // shallowest feasible u wins; ties go to the smallest r, which
        // records list in ascending order
        if (!choice.feasible || *rec.u_feasible > choice.u_opt) {
            choice.feasible = true;
            choice.u_opt = *rec.u_feasible;
            choice.r_opt = rec.r;
        }
    }
    if (!choice.feasible) {
        return choice;
    }

    // recompute the three suffix R^2 values at the winning cell
    const auto& us = scan.grid.u_values;
    std::size_t ri = 0;
    for (std::size_t i = 0; i < scan.grid.r_values.size(); ++i) {
        if (scan.grid.r_values[i] == choice.r_opt) {
            ri = i;
        }
    }
    std::size_t ki = 0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        if (us[i] == choice.u_opt) {
            ki = i;
        }
    }
    std::vector<CurvePoint> mrl, shape, modscale;
    for (std::size_t j = ki; j < us.size(); ++j) {
        if (const auto& cell = scan.cells[ri][j]) {
            mrl.push_back(
                {us[j], cell->mean_excess, cell->se_mean_excess * cell->se_mean_excess});
            shape.push_back({us[j], cell->xi, cell->se_xi * cell->se_xi});
            modscale.push_back(
                {us[j], cell->sigma_star, cell->se_sigma_star * cell->se_sigma_star});
        }
    }
    choice.r2_mrl = screen_score(mrl);
    choice.r2_shape = screen_score(shape);
    choice.r2_modscale = screen_score(modscale);
    return choice;
}

}  // namespace evtail
