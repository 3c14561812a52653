// Command-line front end: analyze / scan / simulate / diagnose.
// Exit codes: 0 success, 2 input or usage error, 3 infeasible analysis.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evtail/decluster.hpp"
#include "evtail/diagnostics.hpp"
#include "evtail/errors.hpp"
#include "evtail/report.hpp"
#include "evtail/synth.hpp"
#include "evtail/trace.hpp"
#include "evtail/version.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw evtail::ParseError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path.string());
    }
    out << content;
}

struct GridFlags {
    std::string u_grid;    // "lo:hi:n"
    std::string r_list;    // "1,2,4"
    double r2_min = 0.95;
    int min_points = 5;

    void attach(CLI::App* cmd) {
        cmd->add_option("--u-grid", u_grid,
                        "threshold grid as lo:hi:n (dBm endpoints, point count)");
        cmd->add_option("--r-list", r_list, "comma-separated declustering run gaps");
        cmd->add_option("--r2-min", r2_min, "linearity screen on suffix R^2")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--min-points", min_points, "minimum populated thresholds per suffix")
            ->check(CLI::PositiveNumber);
    }

    void apply(evtail::AnalyzeOptions& opts) const {
        opts.r2_min = r2_min;
        opts.min_points = min_points;
        if (!u_grid.empty()) {
            double lo = 0.0, hi = 0.0;
            int n = 0;
            if (std::sscanf(u_grid.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3) {
                throw evtail::ParseError("--u-grid expects lo:hi:n");
            }
            opts.u_range = std::make_pair(lo, hi);
            opts.u_count = n;
        }
        if (!r_list.empty()) {
            std::vector<int> rs;
            std::stringstream ss{r_list};
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                try {
                    rs.push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    throw evtail::ParseError("--r-list expects comma-separated integers");
                }
            }
            if (rs.empty()) {
                throw evtail::ParseError("--r-list expects comma-separated integers");
            }
            opts.r_list = rs;
        }
    }
};

void write_tail_plots(const fs::path& dir, const std::string& stem,
                      const evtail::TailAnalysis& tail) {
    write_file(dir / ("pp_" + stem + ".csv"), evtail::plot_csv(tail.pp));
    write_file(dir / ("qq_" + stem + ".csv"), evtail::plot_csv(tail.qq));
}

int cmd_analyze(const std::string& input, const fs::path& out_dir,
                const evtail::AnalyzeOptions& opts) {
    const std::string bytes = read_file(input);
    const evtail::PowerTrace trace = evtail::parse_trace(bytes);

    evtail::AnalysisResult result = evtail::run_analysis(trace, opts);
    result.input_digest = evtail::fnv1a64_digest(bytes);

    fs::create_directories(out_dir);
    write_file(out_dir / "report.json", evtail::report_json(result, evtail::kVersion));
    write_file(out_dir / "mrl.csv", evtail::mrl_csv(result.global_scan));
    for (const int r : result.global_scan.grid.r_values) {
        write_file(out_dir / ("stability_r" + std::to_string(r) + ".csv"),
                   evtail::stability_csv(result.global_scan, r));
    }
    if (result.branch == "non-stationary" && !result.groups.empty()) {
        for (const auto& g : result.groups) {
            write_tail_plots(out_dir, g.label, g);
        }
    } else {
        write_tail_plots(out_dir, "global", result.global);
    }

    std::printf("adf: stat=%.4f cv=%.4f -> %s%s\n", result.adf.statistic,
                result.adf.critical_value, result.adf_verdict.c_str(),
                result.forced ? " (overridden)" : "");
    std::printf("stationary fit: u=%.6g r=%d sigma=%.6g xi=%.4f loglik=%.4f n=%zu\n",
                result.global.threshold.u_opt, result.global.threshold.r_opt,
                result.global.fit.sigma, result.global.fit.xi, result.global.fit.loglik,
                result.global.fit.n_exceedances);
    for (const auto& g : result.groups) {
        std::printf("group %s: u=%.6g r=%d sigma=%.6g xi=%.4f loglik=%.4f n=%zu\n",
                    g.label.c_str(), g.threshold.u_opt, g.threshold.r_opt, g.fit.sigma, g.fit.xi,
                    g.fit.loglik, g.fit.n_exceedances);
    }
    if (result.deviance) {
        std::printf("deviance: D=%.4f c=%.4f k=%d -> %s\n", result.deviance->d,
                    result.deviance->c_alpha, result.deviance->k,
                    result.deviance->reject_stationary ? "reject stationary" : "keep stationary");
    }
    std::printf("selected model: %s\n", result.selected_model.c_str());
    return 0;
}

int cmd_scan(const std::string& input, const fs::path& out_dir, const std::string& group,
             const GridFlags& flags, unsigned threads) {
    const std::string bytes = read_file(input);
    const evtail::PowerTrace trace = evtail::parse_trace(bytes);

    std::vector<double> samples;
    if (group.empty()) {
        samples.assign(trace.power_dbm.begin(), trace.power_dbm.end());
    } else {
        const auto seg = evtail::segment_by_group(trace);
        bool found = false;
        for (const auto& g : seg.groups) {
            if (g.label == group) {
                samples = evtail::group_powers(trace, g);
                found = true;
            }
        }
        if (!found) {
            throw evtail::ParseError("group \"" + group + "\" not present in the trace");
        }
    }

    evtail::AnalyzeOptions opts;
    flags.apply(opts);
    opts.n_threads = threads;

    const evtail::ScanGrid grid = evtail::build_scan_grid(samples, opts);

    const evtail::ThresholdScan sc = evtail::scan(samples, grid, threads);
    bool any = false;
    for (const auto& row : sc.cells) {
        for (const auto& cell : row) {
            any = any || cell.has_value();
        }
    }
    if (!any) {
        throw evtail::AnalysisError("scan: empty tail at every grid threshold");
    }

    fs::create_directories(out_dir);
    write_file(out_dir / "scan.csv", evtail::scan_csv(sc));
    write_file(out_dir / "scan_linearity.csv",
               evtail::linearity_csv(sc, flags.r2_min, flags.min_points));

    const evtail::ThresholdChoice choice =
        evtail::select_threshold(sc, flags.r2_min, flags.min_points);
    if (choice.feasible) {
        std::printf("selected: u=%.6g r=%d (r2 mrl=%.4f shape=%.4f modscale=%.4f)\n",
                    choice.u_opt, choice.r_opt, choice.r2_mrl, choice.r2_shape,
                    choice.r2_modscale);
    } else {
        std::printf("selected: none (no suffix passed the linearity screen)\n");
    }
    return 0;
}

int cmd_simulate(const std::string& spec_path, const std::string& out_path,
                 std::uint64_t seed) {
    const auto specs = evtail::parse_segment_specs(read_file(spec_path));
    const evtail::PowerTrace trace = evtail::generate(specs, seed);
    write_file(out_path, evtail::serialize_trace(trace));
    std::printf("wrote %zu samples, %zu group(s) to %s\n", trace.size(), trace.labels.size(),
                out_path.c_str());
    return 0;
}

int cmd_diagnose(const std::string& input, const fs::path& out_dir, double u, double sigma,
                 double xi) {
    const std::string bytes = read_file(input);
    const evtail::PowerTrace trace = evtail::parse_trace(bytes);

    std::vector<double> below;
    for (const double x : trace.power_dbm) {
        if (x < u) {
            below.push_back(x);
        }
    }
    if (below.size() < 2) {
        throw evtail::AnalysisError("diagnose: fewer than 2 samples below the threshold");
    }
    std::vector<double> y(below.size());
    for (std::size_t i = 0; i < below.size(); ++i) {
        y[i] = u - below[i];
    }

    const evtail::GpdParams params(sigma, xi);
    const evtail::ProbabilityPlot pp = evtail::pp_points(y, params);
    const evtail::ProbabilityPlot qq = evtail::qq_points(below, u, params);
    const evtail::ValidationSummary diag = evtail::summarize_fit(pp, qq);

    fs::create_directories(out_dir);
    write_file(out_dir / "pp.csv", evtail::plot_csv(pp));
    write_file(out_dir / "qq.csv", evtail::plot_csv(qq));

    std::printf("pp: max_abs_dev=%.4f r2=%.4f; qq r2=%.4f; verdict: %s\n", diag.pp_max_abs_dev,
                diag.pp_r2, diag.qq_r2, diag.validated ? "validated" : "not validated");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lower-tail extreme value analysis of received-power traces"};
    app.set_version_flag("--version", std::string(evtail::kVersion));
    app.require_subcommand(1);

    std::string input, out_dir = ".", group, spec_path, sim_out = "trace.csv";
    std::uint64_t seed = 1;
    unsigned threads = 1;
    double diag_u = 0.0, diag_sigma = 0.0, diag_xi = 0.0;

    evtail::AnalyzeOptions opts;
    GridFlags analyze_flags, scan_flags;
    bool force_s = false, force_ns = false;

    auto* analyze = app.add_subcommand("analyze", "full pipeline: branch, fit, test, report");
    analyze->add_option("input", input, "trace CSV (t_ms,power_dbm,group)")->required();
    analyze->add_option("--out-dir", out_dir, "directory for report.json and plot CSVs");
    analyze->add_option("--significance", opts.significance,
                        "stationarity test level (0.01, 0.05 or 0.10)");
    int max_lag = 0;
    auto* max_lag_opt =
        analyze->add_option("--max-lag", max_lag, "cap on the augmentation lag order");
    analyze->add_option("--alpha", opts.alpha, "deviance test level")
        ->check(CLI::Range(1e-6, 0.5));
    analyze_flags.attach(analyze);
    analyze->add_flag("--force-stationary", force_s, "override the stationarity verdict");
    analyze->add_flag("--force-nonstationary", force_ns, "override the stationarity verdict");
    analyze->add_option("--threads", threads, "worker threads for the scan");

    auto* scan = app.add_subcommand("scan", "threshold/run-gap grid diagnostics");
    scan->add_option("input", input, "trace CSV")->required();
    scan->add_option("--out-dir", out_dir, "directory for scan.csv and scan_linearity.csv");
    scan->add_option("--group", group, "restrict to one group label");
    scan_flags.attach(scan);
    scan->add_option("--threads", threads, "worker threads for the scan");

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic trace");
    simulate->add_option("spec", spec_path, "segment spec JSON")->required();
    simulate->add_option("--seed", seed, "generator seed");
    simulate->add_option("--out", sim_out, "output trace path");

    auto* diagnose = app.add_subcommand("diagnose", "probability plots at fixed parameters;"
                                        " uses every sample below u, no declustering");
    diagnose->add_option("input", input, "trace CSV")->required();
    diagnose->add_option("--u", diag_u, "threshold (dBm)")->required();
    diagnose->add_option("--sigma", diag_sigma, "scale")->required();
    diagnose->add_option("--xi", diag_xi, "shape")->required();
    diagnose->add_option("--out-dir", out_dir, "directory for pp.csv and qq.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (analyze->parsed()) {
            analyze_flags.apply(opts);
            if (max_lag_opt->count() > 0) {
                opts.max_lag = max_lag;
            }
            opts.force_stationary = force_s;
            opts.force_nonstationary = force_ns;
            opts.n_threads = threads;
            return cmd_analyze(input, out_dir, opts);
        }
        if (scan->parsed()) {
            return cmd_scan(input, out_dir, group, scan_flags, threads);
        }
        if (simulate->parsed()) {
            return cmd_simulate(spec_path, sim_out, seed);
        }
        if (diagnose->parsed()) {
            return cmd_diagnose(input, out_dir, diag_u, diag_sigma, diag_xi);
        }
    } catch (const evtail::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const evtail::AnalysisError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
