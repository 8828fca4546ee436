#include "gcimb/csv_report.hpp"
#include "gcimb/scenario_io.hpp"
#include "gcimb/scenarios.hpp"
#include "gcimb/svg_plot.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using gcimb::Experiment;
using gcimb::MonteCarloSummary;
using gcimb::ScenarioConfig;
using gcimb::StepAggregate;
using gcimb::WorkMode;
using nlohmann::json;

json minimal_config() {
    return json::parse(R"({
        "sensor": {"snr_db": 15.0},
        "truth": {"parallel_pair": {"separation": 8.0}}
    })");
}

// ---- experiment_from_json ----

TEST(ExperimentFromJson, MinimalConfigResolvesToDefaults) {
    const Experiment ex = gcimb::experiment_from_json(minimal_config());
    EXPECT_EQ(ex.seed, 1u);
    EXPECT_EQ(ex.runs, 1);
    EXPECT_EQ(ex.scenario.mode, WorkMode::M1);
    EXPECT_EQ(ex.scenario.steps, 30);
    EXPECT_EQ(ex.scenario.topology.node_count(), 1);
    EXPECT_NEAR(ex.scenario.sensor.snr_db(), 15.0, 1e-12);
    EXPECT_EQ(ex.scenario.filter.particles_per_track, 200);
    ASSERT_EQ(ex.scenario.truth.targets.size(), 2u);
    EXPECT_EQ(ex.scenario.truth.targets[0].states.size(), 30u);
    EXPECT_NO_THROW(gcimb::validate(ex.scenario));
}

TEST(ExperimentFromJson, MissingSnrNamesTheField) {
    json cfg = minimal_config();
    cfg["sensor"].erase("snr_db");
    try {
        (void)gcimb::experiment_from_json(cfg);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& err) {
        EXPECT_NE(std::string(err.what()).find("sensor.snr_db"), std::string::npos)
            << err.what();
    }
}

TEST(ExperimentFromJson, MissingTruthNamesTheField) {
    json cfg = minimal_config();
    cfg.erase("truth");
    try {
        (void)gcimb::experiment_from_json(cfg);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& err) {
        EXPECT_NE(std::string(err.what()).find("truth"), std::string::npos) << err.what();
    }
}

TEST(ExperimentFromJson, UnknownKeyNamesTheField) {
    json cfg = minimal_config();
    cfg["sensor"]["snr"] = 12.0;
    try {
        (void)gcimb::experiment_from_json(cfg);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& err) {
        EXPECT_NE(std::string(err.what()).find("sensor.snr"), std::string::npos) << err.what();
    }
}

TEST(ExperimentFromJson, WrongTypeNamesTheField) {
    json cfg = minimal_config();
    cfg["runs"] = "many";
    EXPECT_THROW((void)gcimb::experiment_from_json(cfg), std::invalid_argument);
}

TEST(ExperimentFromJson, RejectsBadMode) {
    json cfg = minimal_config();
    cfg["mode"] = "M3";
    EXPECT_THROW((void)gcimb::experiment_from_json(cfg), std::invalid_argument);
}

TEST(ExperimentFromJson, TruthVariantsAreExclusive) {
    json cfg = minimal_config();
    cfg["truth"]["three_lanes"] = json::object();
    EXPECT_THROW((void)gcimb::experiment_from_json(cfg), std::invalid_argument);
    cfg["truth"] = json::object();
    EXPECT_THROW((void)gcimb::experiment_from_json(cfg), std::invalid_argument);
}

TEST(ExperimentFromJson, ExplicitTargetsRoundTrip) {
    json cfg = minimal_config();
    cfg["truth"] = {{"targets",
                     {{{"birth", 3},
                       {"states", {{1.0, 2.0, 0.5, -0.5}, {1.5, 1.5, 0.5, -0.5}}}}}}};
    const Experiment ex = gcimb::experiment_from_json(cfg);
    ASSERT_EQ(ex.scenario.truth.targets.size(), 1u);
    EXPECT_EQ(ex.scenario.truth.targets[0].birth, 3);
    ASSERT_EQ(ex.scenario.truth.targets[0].states.size(), 2u);
    EXPECT_DOUBLE_EQ(ex.scenario.truth.targets[0].states[1](1), 1.5);
}

TEST(ExperimentFromJson, TopologyEdgesAreApplied) {
    json cfg = minimal_config();
    cfg["topology"] = {{"nodes", 3}, {"edges", {{0, 1}, {1, 2}}}};
    const Experiment ex = gcimb::experiment_from_json(cfg);
    EXPECT_EQ(ex.scenario.topology.node_count(), 3);
    EXPECT_TRUE(ex.scenario.topology.is_adjacent(1, 2));
    EXPECT_FALSE(ex.scenario.topology.is_adjacent(0, 2));

    cfg["topology"]["edges"] = {{0, 1}};  // node 2 disconnected
    EXPECT_THROW((void)gcimb::experiment_from_json(cfg), std::invalid_argument);
}

// ---- experiment_to_json round trip ----

TEST(ExperimentToJson, PresetSurvivesRoundTrip) {
    Experiment ex;
    ex.scenario = gcimb::sensor_chain_scenario(3, WorkMode::M2, 12.0);
    ex.seed = 77;
    ex.runs = 5;
    const json resolved = gcimb::experiment_to_json(ex);
    const Experiment back = gcimb::experiment_from_json(resolved);

    EXPECT_EQ(back.seed, 77u);
    EXPECT_EQ(back.runs, 5);
    EXPECT_EQ(back.scenario.mode, WorkMode::M2);
    EXPECT_EQ(back.scenario.topology.node_count(), 3);
    EXPECT_EQ(back.scenario.sensor.template_radius, 2);
    EXPECT_NEAR(back.scenario.sensor.snr_db(), 12.0, 1e-12);
    ASSERT_EQ(back.scenario.truth.targets.size(), 3u);
    for (std::size_t t = 0; t < 3; ++t) {
        const auto& a = ex.scenario.truth.targets[t];
        const auto& b = back.scenario.truth.targets[t];
        ASSERT_EQ(a.states.size(), b.states.size());
        for (std::size_t k = 0; k < a.states.size(); ++k) {
            EXPECT_EQ(a.states[k], b.states[k]);
        }
    }
    // The resolved form is stable: dumping it again changes nothing.
    EXPECT_EQ(resolved.dump(), gcimb::experiment_to_json(back).dump());
}

// ---- CSV writers ----

TEST(CsvReport, FormatNumberRoundTripsAndUsesDotDecimal) {
    EXPECT_EQ(gcimb::format_number(0.5), "0.5");
    EXPECT_EQ(gcimb::format_number(2.0), "2");
    EXPECT_EQ(gcimb::format_number(1e-06), "1e-06");
    const double v = 0.12820000000000001;
    EXPECT_EQ(std::stod(gcimb::format_number(v)), v);
}

TEST(CsvReport, StepCsvMatchesPinnedSchema) {
    const std::vector<StepAggregate> rows = {
        {1, 0, 0.5, 0.25, 2.0, 2.0, 0.0},
        {1, 1, 0.625, 0.25, 1.5, 2.0, 0.0},
    };
    std::ostringstream out;
    gcimb::write_step_csv(out, rows, WorkMode::M2, json{{"seed", 9}});
    const std::string text = out.str();

    EXPECT_EQ(text,
              "# config: {\"seed\":9}\n"
              "step,node,mode,local_ospa,fused_ospa,card_local,card_fused\n"
              "1,0,M2,0.5,0.25,2,2\n"
              "1,1,M2,0.625,0.25,1.5,2\n");
    EXPECT_EQ(text.find("\r"), std::string::npos);
}

TEST(CsvReport, SummaryCsvCarriesTheMetrics) {
    MonteCarloSummary summary;
    summary.runs = 4;
    summary.mean_local_ospa = 0.25;
    summary.mean_fused_ospa = 0.125;
    summary.efficiency = 1.0;
    summary.mean_approx_error = 0.0625;
    std::ostringstream out;
    gcimb::write_summary_csv(out, summary, WorkMode::M1, json{{"seed", 3}});
    EXPECT_EQ(out.str(),
              "# config: {\"seed\":3}\n"
              "metric,value\n"
              "runs,4\n"
              "mode,M1\n"
              "mean_local_ospa,0.25\n"
              "mean_fused_ospa,0.125\n"
              "efficiency,1\n"
              "mean_approx_error,0.0625\n");
}

TEST(CsvReport, ConfigCommentEmbedsResolvedExperiment) {
    Experiment ex;
    ex.scenario = gcimb::two_sensor_separation_scenario(8.0);
    ex.seed = 42;
    const std::string comment = gcimb::config_comment(gcimb::experiment_to_json(ex));
    ASSERT_TRUE(comment.rfind("# config: ", 0) == 0);
    ASSERT_EQ(comment.back(), '\n');
    const json parsed = json::parse(comment.substr(10));
    EXPECT_EQ(parsed.at("seed").get<std::uint64_t>(), 42u);
    EXPECT_EQ(parsed.at("topology").at("nodes").get<int>(), 2);
    EXPECT_NEAR(parsed.at("sensor").at("snr_db").get<double>(), 15.0, 1e-12);
}

// ---- SVG charts ----

TEST(SvgPlot, RendersSeriesAxesAndLegend) {
    gcimb::LineChart chart("OSPA", "scan", "meters");
    chart.add({"local", {1.0, 2.0, 3.0}, {0.5, 0.4, 0.3}});
    chart.add({"fused", {1.0, 2.0, 3.0}, {0.4, 0.3, 0.2}});
    const std::string svg = chart.render();
    EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t at = svg.find("<polyline"); at != std::string::npos;
         at = svg.find("<polyline", at + 1)) {
        ++polylines;
    }
    EXPECT_EQ(polylines, 2u);
    EXPECT_NE(svg.find(">local</text>"), std::string::npos);
    EXPECT_NE(svg.find(">fused</text>"), std::string::npos);
    EXPECT_NE(svg.find(">OSPA</text>"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(SvgPlot, EscapesMarkupInLabels) {
    gcimb::LineChart chart("a < b & c", "x", "y");
    chart.add({"s", {0.0, 1.0}, {0.0, 1.0}});
    const std::string svg = chart.render();
    EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
    EXPECT_EQ(svg.find("a < b"), std::string::npos);
}

TEST(SvgPlot, RejectsMalformedSeries) {
    gcimb::LineChart chart("t", "x", "y");
    EXPECT_THROW(chart.add({"bad", {1.0, 2.0}, {1.0}}), std::invalid_argument);
    EXPECT_THROW(chart.add({"empty", {}, {}}), std::invalid_argument);
    EXPECT_THROW((void)chart.render(), std::logic_error);
}

} // namespace
