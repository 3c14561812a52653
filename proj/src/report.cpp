#include "evtail/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "evtail/errors.hpp"
#include "evtail/version.hpp"

namespace evtail {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// dBm-scaled quantities carry 6 significant digits in emitted files
std::string dbm(double v) { return fmt("%.6g", v); }
std::string num(double v) { return fmt("%.9g", v); }

}  // namespace

ScanGrid build_scan_grid(std::span<const double> samples, const AnalyzeOptions& opts) {
    ScanGrid grid = ScanGrid::default_for(samples);
    if (opts.u_range) {
        const double shallow = std::max(opts.u_range->first, opts.u_range->second);
        const double deep = std::min(opts.u_range->first, opts.u_range->second);
        if (!(deep < shallow)) {
            throw std::invalid_argument("u grid: endpoints must differ");
        }
        const int n = opts.u_count.value_or(40);
        if (n < 8) {
            throw std::invalid_argument("u grid: need at least 8 thresholds");
        }
        grid.u_values.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            grid.u_values[static_cast<std::size_t>(i)] =
                shallow + (deep - shallow) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
    }
    if (opts.r_list) {
        grid.r_values = *opts.r_list;
    }
    grid.validate();
    return grid;
}

namespace {

// Scan, select, decluster, fit, diagnose one sample set.
TailAnalysis analyze_tail(std::string label, std::span<const double> samples,
                          const AnalyzeOptions& opts, ThresholdScan* keep_scan) {
    TailAnalysis out;
    out.label = std::move(label);
    out.n_samples = samples.size();

    const ScanGrid grid = build_scan_grid(samples, opts);
    ThresholdScan sc = scan(samples, grid, opts.n_threads);
    out.threshold = select_threshold(sc, opts.r2_min, opts.min_points);
    if (!out.threshold.feasible) {
        throw AnalysisError("group \"" + out.label +
                            "\": no threshold passed the linearity screen (r2_min=" +
                            fmt("%g", opts.r2_min) + ")");
    }

    const ClusterMinima clusters =
        decluster(samples, DeclusterConfig(out.threshold.u_opt, out.threshold.r_opt));
    std::vector<double> y(clusters.minima.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = out.threshold.u_opt - clusters.minima[i];
    }
    try {
        out.fit = gpd_fit_mle(y, out.threshold.u_opt);
    } catch (const AnalysisError& e) {
        throw AnalysisError("group \"" + out.label + "\": " + e.what());
    }

    const GpdParams params(out.fit.sigma, out.fit.xi);
    out.pp = pp_points(y, params);
    out.qq = qq_points(clusters.minima, out.threshold.u_opt, params);
    out.diag = summarize_fit(out.pp, out.qq);

    if (keep_scan) {
        *keep_scan = std::move(sc);
    }
    return out;
}

}  // namespace

AnalysisResult run_analysis(const PowerTrace& trace, const AnalyzeOptions& opts) {
    if (opts.force_stationary && opts.force_nonstationary) {
        throw std::invalid_argument("analyze: both force flags given");
    }
    if (trace.empty()) {
        throw std::invalid_argument("analyze: empty trace");
    }

    AnalysisResult res;
    res.n_samples = trace.size();
    res.t_first_ms = trace.t_ms.front();
    res.t_last_ms = trace.t_ms.back();

    res.adf = adf_test(trace.powers(), opts.max_lag, opts.significance);
    res.adf_verdict = res.adf.reject_unit_root ? "stationary" : "non-stationary";
    res.branch = res.adf_verdict;
    if (opts.force_stationary && res.branch != "stationary") {
        res.branch = "stationary";
        res.forced = true;
        res.warnings.push_back("ADF verdict overridden by --force-stationary");
    }
    if (opts.force_nonstationary && res.branch != "non-stationary") {
        res.branch = "non-stationary";
        res.forced = true;
        res.warnings.push_back("ADF verdict overridden by --force-nonstationary");
    }

    const GroupSegmentation seg = segment_by_group(trace);
    for (const auto& g : seg.groups) {
        res.group_sizes.emplace_back(g.label, g.total());
    }

    res.global = analyze_tail("global", trace.powers(), opts, &res.global_scan);

    if (res.branch == "non-stationary" && seg.count() < 2) {
        res.warnings.push_back(
            "single group: change-point model coincides with the stationary model; "
            "deviance test skipped");
        res.selected_model = "stationary";
        return res;
    }

    if (res.branch == "stationary") {
        res.selected_model = "stationary";
        return res;
    }

    double loglik_ns = 0.0;
    bool mismatch = false;
    for (const auto& g : seg.groups) {
        const std::vector<double> xs = group_powers(trace, g);
        res.groups.push_back(analyze_tail(g.label, xs, opts, nullptr));
        const TailAnalysis& ta = res.groups.back();
        loglik_ns += ta.fit.loglik;
        if (ta.threshold.u_opt != res.global.threshold.u_opt ||
            ta.threshold.r_opt != res.global.threshold.r_opt) {
            mismatch = true;
        }
    }
    if (mismatch) {
        res.warnings.push_back(
            "per-group thresholds differ from the stationary competitor's; deviance "
            "compares likelihoods over different exceedance sets and the chi-squared "
            "reference is approximate");
    }

    const int k = 2 * (static_cast<int>(seg.count()) - 1);
    res.deviance = deviance_test(loglik_ns, res.global.fit.loglik, k, opts.alpha);
    res.selected_model = res.deviance->reject_stationary ? "change-point" : "stationary";
    return res;
}

namespace {

nlohmann::json threshold_json(const ThresholdChoice& t) {
    return {{"u_opt", round_6sig(t.u_opt)}, {"r_opt", t.r_opt},
            {"r2_mrl", t.r2_mrl},           {"r2_shape", t.r2_shape},
            {"r2_modscale", t.r2_modscale}, {"feasible", t.feasible}};
}

nlohmann::json fit_json(const GpdFit& f) {
    return {{"u", round_6sig(f.u)},   {"sigma", round_6sig(f.sigma)},
            {"xi", f.xi},             {"loglik", f.loglik},
            {"n_exceedances", f.n_exceedances}, {"converged", f.converged}};
}

nlohmann::json diag_json(const ValidationSummary& d) {
    return {{"pp_max_abs_dev", d.pp_max_abs_dev},
            {"pp_r2", d.pp_r2},
            {"qq_max_abs_dev", d.qq_max_abs_dev},
            {"qq_r2", d.qq_r2},
            {"validated", d.validated}};
}

nlohmann::json tail_json(const TailAnalysis& t) {
    return {{"label", t.label},
            {"n_samples", t.n_samples},
            {"threshold", threshold_json(t.threshold)},
            {"fit", fit_json(t.fit)},
            {"diagnostics", diag_json(t.diag)}};
}

}  // namespace

std::string report_json(const AnalysisResult& r, std::string_view tool_version) {
    nlohmann::json doc;
    doc["tool_version"] = std::string(tool_version);

    nlohmann::json input;
    input["digest"] = r.input_digest;
    input["n_samples"] = r.n_samples;
    input["t_first_ms"] = r.t_first_ms;
    input["t_last_ms"] = r.t_last_ms;
    input["groups"] = nlohmann::json::array();
    for (const auto& [label, n] : r.group_sizes) {
        input["groups"].push_back({{"label", label}, {"n_samples", n}});
    }
    doc["input"] = input;

    doc["adf"] = {{"statistic", r.adf.statistic},
                  {"critical_value", r.adf.critical_value},
                  {"significance", r.adf.significance},
                  {"lags", r.adf.lags},
                  {"reject_unit_root", r.adf.reject_unit_root},
                  {"verdict", r.adf_verdict}};
    doc["branch"] = r.branch;
    doc["forced"] = r.forced;

    doc["stationary_model"] = tail_json(r.global);
    doc["groups"] = nlohmann::json::array();
    for (const auto& g : r.groups) {
        doc["groups"].push_back(tail_json(g));
    }
    if (r.deviance) {
        doc["deviance"] = {{"d", r.deviance->d},
                           {"c_alpha", r.deviance->c_alpha},
                           {"alpha", r.deviance->alpha},
                           {"k", r.deviance->k},
                           {"reject_stationary", r.deviance->reject_stationary}};
    }
    doc["selected_model"] = r.selected_model;
    doc["warnings"] = r.warnings;
    return doc.dump(2) + "\n";
}

std::string scan_csv(const ThresholdScan& sc) {
    std::string out = "u_dbm,r,mean_excess,xi,sigma,sigma_star,n_exceed\n";
    for (std::size_t ri = 0; ri < sc.grid.r_values.size(); ++ri) {
        for (std::size_t ui = 0; ui < sc.grid.u_values.size(); ++ui) {
            const auto& cell = sc.cells[ri][ui];
            if (!cell) {
                continue;
            }
            out += dbm(sc.grid.u_values[ui]) + ',' + std::to_string(sc.grid.r_values[ri]) + ',' +
                   dbm(cell->mean_excess) + ',' + num(cell->xi) + ',' + dbm(cell->sigma) + ',' +
                   dbm(cell->sigma_star) + ',' + std::to_string(cell->n_exceed) + '\n';
        }
    }
    return out;
}

std::string mrl_csv(const ThresholdScan& sc) {
    std::string out = "u_dbm,r,mean_excess\n";
    for (std::size_t ri = 0; ri < sc.grid.r_values.size(); ++ri) {
        for (std::size_t ui = 0; ui < sc.grid.u_values.size(); ++ui) {
            const auto& cell = sc.cells[ri][ui];
            if (!cell) {
                continue;
            }
            out += dbm(sc.grid.u_values[ui]) + ',' + std::to_string(sc.grid.r_values[ri]) + ',' +
                   dbm(cell->mean_excess) + '\n';
        }
    }
    return out;
}

std::string stability_csv(const ThresholdScan& sc, int r) {
    std::size_t ri = SIZE_MAX;
    for (std::size_t i = 0; i < sc.grid.r_values.size(); ++i) {
        if (sc.grid.r_values[i] == r) {
            ri = i;
        }
    }
    if (ri == SIZE_MAX) {
        throw std::invalid_argument("stability csv: r not in the scan grid");
    }
    std::string out = "u_dbm,xi,sigma,sigma_star,n_exceed\n";
    for (std::size_t ui = 0; ui < sc.grid.u_values.size(); ++ui) {
        const auto& cell = sc.cells[ri][ui];
        if (!cell) {
            continue;
        }
        out += dbm(sc.grid.u_values[ui]) + ',' + num(cell->xi) + ',' + dbm(cell->sigma) + ',' +
               dbm(cell->sigma_star) + ',' + std::to_string(cell->n_exceed) + '\n';
    }
    return out;
}

std::string plot_csv(const ProbabilityPlot& plot) {
    std::string out = "empirical,model\n";
    for (const auto& p : plot.points) {
        out += num(p.empirical) + ',' + num(p.model) + '\n';
    }
    return out;
}

std::string linearity_csv(const ThresholdScan& sc, double r2_min, int min_points) {
    const auto records = linearity_records(sc, r2_min, min_points);
    std::string out = "r,u_star_mrl,u_star_shape,u_star_modscale,u_feasible\n";
    auto cell = [&](const std::optional<double>& v) { return v ? dbm(*v) : std::string(); };
    for (const auto& rec : records) {
        out += std::to_string(rec.r) + ',' + cell(rec.u_star_mrl) + ',' +
               cell(rec.u_star_shape) + ',' + cell(rec.u_star_modscale) + ',' +
               cell(rec.u_feasible) + '\n';
    }
    return out;
}

std::string fnv1a64_digest(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double round_6sig(double v) {
    if (!std::isfinite(v) || v == 0.0) {
        return v;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::strtod(buf, nullptr);
}

}  // namespace evtail
