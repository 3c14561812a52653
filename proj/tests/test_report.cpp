#include "evtail/report.hpp"

#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evtail/errors.hpp"
#include "evtail/synth.hpp"

using evtail::AnalysisError;
using evtail::AnalysisResult;
using evtail::AnalyzeOptions;
using evtail::PowerTrace;
using evtail::ScanGrid;
using evtail::SegmentSpec;
using evtail::build_scan_grid;
using evtail::fnv1a64_digest;
using evtail::report_json;
using evtail::round_6sig;
using evtail::run_analysis;

namespace {

SegmentSpec seg_spec(std::string label, std::size_t n, double xi) {
    SegmentSpec s;
    s.label = std::move(label);
    s.n = n;
    s.bulk_mean = -20.0;
    s.bulk_sd = 6.0;
    s.tail_u = -34.0;
    s.tail_sigma = 2.5;
    s.tail_xi = xi;
    s.tail_prob = 0.05;
    s.ar_coeff = 0.5;
    return s;
}

PowerTrace one_group_trace(std::uint64_t seed = 17) {
    return evtail::generate(std::vector<SegmentSpec>{seg_spec("a", 30000, -0.25)}, seed);
}

}  // namespace

TEST_CASE("input digest") {
    CHECK(fnv1a64_digest("") == "fnv1a64:cbf29ce484222325");
    CHECK(fnv1a64_digest("a") == "fnv1a64:af63dc4c8601ec8c");
    CHECK(fnv1a64_digest("foobar") == "fnv1a64:85944171f73967e8");
    CHECK(fnv1a64_digest("x") != fnv1a64_digest("y"));
}

TEST_CASE("six significant digit rounding") {
    CHECK(round_6sig(1234567.89) == 1234570.0);
    CHECK(round_6sig(-0.000123456789) == -0.000123457);
    CHECK(round_6sig(2.5) == 2.5);
    CHECK(round_6sig(0.0) == 0.0);
    CHECK(std::isinf(round_6sig(std::numeric_limits<double>::infinity())));
    CHECK(std::isnan(round_6sig(std::numeric_limits<double>::quiet_NaN())));
}

TEST_CASE("scan grid overrides") {
    const auto trace = one_group_trace();
    AnalyzeOptions opts;

    const auto dflt = build_scan_grid(trace.powers(), opts);
    CHECK(dflt.u_values.size() == 40);
    CHECK(dflt.r_values == std::vector<int>{1, 2, 4, 8, 12, 16, 24, 32});

    opts.u_range = {{-25.0, -35.0}};
    opts.u_count = 11;
    auto grid = build_scan_grid(trace.powers(), opts);
    REQUIRE(grid.u_values.size() == 11);
    CHECK(grid.u_values.front() == -25.0);
    CHECK(grid.u_values.back() == -35.0);
    CHECK(grid.u_values[5] == doctest::Approx(-30.0).epsilon(1e-12));

    // endpoint order is normalized
    opts.u_range = {{-35.0, -25.0}};
    const auto swapped = build_scan_grid(trace.powers(), opts);
    CHECK(swapped.u_values == grid.u_values);

    opts.r_list = {{2, 6}};
    grid = build_scan_grid(trace.powers(), opts);
    CHECK(grid.r_values == std::vector<int>{2, 6});

    opts.u_count = 5;
    CHECK_THROWS_AS(build_scan_grid(trace.powers(), opts), std::invalid_argument);
    opts.u_count = 11;
    opts.u_range = {{-30.0, -30.0}};
    CHECK_THROWS_AS(build_scan_grid(trace.powers(), opts), std::invalid_argument);
    opts.u_range = {{-25.0, -35.0}};
    opts.r_list = {{4, 2}};
    CHECK_THROWS_AS(build_scan_grid(trace.powers(), opts), std::invalid_argument);
}

TEST_CASE("stationary trace takes the stationary branch") {
    const auto trace = one_group_trace();
    AnalyzeOptions opts;
    opts.n_threads = 2;
    const auto res = run_analysis(trace, opts);

    CHECK(res.n_samples == trace.size());
    CHECK(res.t_first_ms == 0);
    CHECK(res.t_last_ms == trace.t_ms.back());
    CHECK(res.adf.reject_unit_root);
    CHECK(res.adf_verdict == "stationary");
    CHECK(res.branch == "stationary");
    CHECK_FALSE(res.forced);
    CHECK(res.selected_model == "stationary");
    CHECK_FALSE(res.deviance.has_value());
    CHECK(res.groups.empty());
    CHECK(res.warnings.empty());

    REQUIRE(res.group_sizes.size() == 1);
    CHECK(res.group_sizes[0].first == "a");
    CHECK(res.group_sizes[0].second == trace.size());

    CHECK(res.global.label == "global");
    CHECK(res.global.n_samples == trace.size());
    REQUIRE(res.global.threshold.feasible);
    CHECK(res.global.threshold.u_opt == doctest::Approx(-34.0).epsilon(0.03));
    CHECK(res.global.fit.converged);
    CHECK(std::isfinite(res.global.fit.loglik));
    CHECK(res.global.fit.n_exceedances >= 10);
    CHECK(res.global_scan.grid.u_values.size() == 40);

    // forcing the branch it already took changes nothing
    AnalyzeOptions forced = opts;
    forced.force_stationary = true;
    const auto res2 = run_analysis(trace, forced);
    CHECK_FALSE(res2.forced);
    CHECK(res2.warnings.empty());
    CHECK(res2.branch == "stationary");
}

TEST_CASE("forcing non-stationary on a single group falls back") {
    const auto trace = one_group_trace();
    AnalyzeOptions opts;
    opts.n_threads = 2;
    opts.force_nonstationary = true;
    const auto res = run_analysis(trace, opts);

    CHECK(res.branch == "non-stationary");
    CHECK(res.forced);
    CHECK(res.selected_model == "stationary");
    CHECK_FALSE(res.deviance.has_value());
    CHECK(res.groups.empty());

    bool override_warned = false, single_warned = false;
    for (const auto& w : res.warnings) {
        if (w.find("--force-nonstationary") != std::string::npos) {
            override_warned = true;
        }
        if (w.find("single group") != std::string::npos) {
            single_warned = true;
        }
    }
    CHECK(override_warned);
    CHECK(single_warned);
}

TEST_CASE("both force flags conflict") {
    const auto trace = one_group_trace();
    AnalyzeOptions opts;
    opts.force_stationary = true;
    opts.force_nonstationary = true;
    CHECK_THROWS_AS(run_analysis(trace, opts), std::invalid_argument);
}

TEST_CASE("non-stationary branch fits per-group models and tests deviance") {
    const std::vector<SegmentSpec> specs{seg_spec("lab", 30000, 0.1),
                                         seg_spec("street", 30000, -0.3),
                                         seg_spec("garage", 30000, -0.45)};
    const auto trace = evtail::generate(specs, 2718);
    AnalyzeOptions opts;
    opts.n_threads = 2;
    opts.force_nonstationary = true;
    opts.u_range = {{-28.0, -38.0}};
    opts.u_count = 20;
    opts.r_list = {{1, 2, 4}};
    const auto res = run_analysis(trace, opts);

    CHECK(res.branch == "non-stationary");
    REQUIRE(res.groups.size() == 3);
    CHECK(res.groups[0].label == "lab");
    CHECK(res.groups[1].label == "street");
    CHECK(res.groups[2].label == "garage");

    double loglik_ns = 0.0;
    bool mismatch = false;
    for (const auto& g : res.groups) {
        REQUIRE(g.threshold.feasible);
        CHECK(g.fit.converged);
        CHECK(g.n_samples == 30000);
        loglik_ns += g.fit.loglik;
        if (g.threshold.u_opt != res.global.threshold.u_opt ||
            g.threshold.r_opt != res.global.threshold.r_opt) {
            mismatch = true;
        }
    }

    REQUIRE(res.deviance.has_value());
    CHECK(res.deviance->k == 4);
    CHECK(res.deviance->alpha == 0.01);
    CHECK(res.deviance->d ==
          doctest::Approx(2.0 * (loglik_ns - res.global.fit.loglik)).epsilon(1e-9));
    CHECK(res.selected_model ==
          (res.deviance->reject_stationary ? "change-point" : "stationary"));

    bool caveat = false;
    for (const auto& w : res.warnings) {
        if (w.find("different exceedance sets") != std::string::npos) {
            caveat = true;
        }
    }
    CHECK(caveat == mismatch);

    // group shapes separate in the expected order
    CHECK(res.groups[0].fit.xi > res.groups[1].fit.xi);
    CHECK(res.groups[1].fit.xi > res.groups[2].fit.xi);
}

TEST_CASE("infeasible selection names the offending set") {
    const auto trace = one_group_trace();
    AnalyzeOptions opts;
    opts.u_range = {{-80.0, -90.0}};  // below every sample
    CHECK_THROWS_WITH_AS(run_analysis(trace, opts), doctest::Contains("global"), AnalysisError);
}

TEST_CASE("report json shape and determinism") {
    const auto trace = one_group_trace();
    AnalyzeOptions opts;
    opts.n_threads = 2;
    auto res = run_analysis(trace, opts);
    res.input_digest = fnv1a64_digest(evtail::serialize_trace(trace));

    const std::string text = report_json(res, "0.3.1");
    CHECK(report_json(res, "0.3.1") == text);

    const auto doc = nlohmann::json::parse(text);
    CHECK(doc["tool_version"] == "0.3.1");
    CHECK(doc["input"]["digest"] == res.input_digest);
    CHECK(doc["input"]["n_samples"] == trace.size());
    CHECK(doc["input"]["t_first_ms"] == 0);
    CHECK(doc["input"]["groups"].size() == 1);
    CHECK(doc["input"]["groups"][0]["label"] == "a");
    CHECK(doc["adf"]["verdict"] == "stationary");
    CHECK(doc["adf"]["reject_unit_root"] == true);
    CHECK(doc["branch"] == "stationary");
    CHECK(doc["forced"] == false);
    CHECK(doc["selected_model"] == "stationary");
    CHECK_FALSE(doc.contains("deviance"));
    CHECK(doc["groups"].empty());
    CHECK(doc["warnings"].empty());

    const auto& sm = doc["stationary_model"];
    CHECK(sm["label"] == "global");
    CHECK(sm["threshold"]["feasible"] == true);
    CHECK(sm["threshold"]["u_opt"].is_number());
    CHECK(sm["fit"]["sigma"].is_number());
    CHECK(sm["fit"]["n_exceedances"].is_number_unsigned());
    CHECK(sm["diagnostics"]["validated"].is_boolean());

    // rerunning the whole pipeline reproduces the bytes
    auto res_again = run_analysis(trace, opts);
    res_again.input_digest = res.input_digest;
    CHECK(report_json(res_again, "0.3.1") == text);

    // the deviance block appears on the non-stationary path
    const std::vector<SegmentSpec> specs{seg_spec("a", 20000, 0.1), seg_spec("b", 20000, -0.3)};
    const auto tr2 = evtail::generate(specs, 5);
    AnalyzeOptions o2;
    o2.n_threads = 2;
    o2.force_nonstationary = true;
    o2.u_range = {{-28.0, -38.0}};
    o2.u_count = 20;
    o2.r_list = {{1, 2, 4}};
    auto r2 = run_analysis(tr2, o2);
    r2.input_digest = fnv1a64_digest("x");
    const auto doc2 = nlohmann::json::parse(report_json(r2, "0.3.1"));
    REQUIRE(doc2.contains("deviance"));
    CHECK(doc2["deviance"]["k"] == 2);
    CHECK(doc2["groups"].size() == 2);
}

TEST_CASE("csv renderers") {
    const auto trace = one_group_trace();
    AnalyzeOptions opts;
    opts.n_threads = 2;
    const auto res = run_analysis(trace, opts);
    const auto& sc = res.global_scan;

    const auto count_lines = [](const std::string& s) {
        std::size_t n = 0;
        for (const char c : s) {
            if (c == '\n') {
                ++n;
            }
        }
        return n;
    };
    std::size_t populated = 0;
    for (const auto& row : sc.cells) {
        for (const auto& cell : row) {
            if (cell) {
                ++populated;
            }
        }
    }

    const auto scan_text = evtail::scan_csv(sc);
    CHECK(scan_text.rfind("u_dbm,r,mean_excess,xi,sigma,sigma_star,n_exceed\n", 0) == 0);
    CHECK(count_lines(scan_text) == populated + 1);

    const auto mrl_text = evtail::mrl_csv(sc);
    CHECK(mrl_text.rfind("u_dbm,r,mean_excess\n", 0) == 0);
    CHECK(count_lines(mrl_text) == populated + 1);

    const auto stab = evtail::stability_csv(sc, sc.grid.r_values[0]);
    CHECK(stab.rfind("u_dbm,xi,sigma,sigma_star,n_exceed\n", 0) == 0);
    std::size_t pop_r0 = 0;
    for (const auto& cell : sc.cells[0]) {
        if (cell) {
            ++pop_r0;
        }
    }
    CHECK(count_lines(stab) == pop_r0 + 1);
    CHECK_THROWS_AS(evtail::stability_csv(sc, 999), std::invalid_argument);

    const auto pp_text = evtail::plot_csv(res.global.pp);
    CHECK(pp_text.rfind("empirical,model\n", 0) == 0);
    CHECK(count_lines(pp_text) == res.global.pp.points.size() + 1);

    const auto lin = evtail::linearity_csv(sc, 0.95, 5);
    CHECK(lin.rfind("r,u_star_mrl,u_star_shape,u_star_modscale,u_feasible\n", 0) == 0);
    CHECK(count_lines(lin) == sc.grid.r_values.size() + 1);

    // a linearity row with no qualifying suffix keeps its commas
    const auto strict = evtail::linearity_csv(sc, 0.95, 1000);
    const auto first_row = strict.substr(strict.find('\n') + 1);
    const auto row = first_row.substr(0, first_row.find('\n'));
    CHECK(row == std::to_string(sc.grid.r_values[0]) + ",,,,");
}
