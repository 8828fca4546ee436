// Command-line front end: runs tracking/fusion experiments from JSON
// scenario configs and reproduces the toolkit's reference studies as CSV
// tables and static SVG plots.

#include "gcimb/csv_report.hpp"
#include "gcimb/metrics.hpp"
#include "gcimb/scenario_io.hpp"
#include "gcimb/scenarios.hpp"
#include "gcimb/sensor_network.hpp"
#include "gcimb/svg_plot.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using gcimb::Experiment;
using gcimb::LineChart;
using gcimb::LineSeries;
using gcimb::MonteCarloSummary;
using gcimb::StepAggregate;
using gcimb::WorkMode;

struct RunOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<std::string> mode;
    std::optional<double> snr;
    std::optional<double> separation;
};

/// Node-averaged per-step series extracted from the (step, node) table.
struct StepSeries {
    std::vector<double> step;
    std::vector<double> local_ospa;
    std::vector<double> fused_ospa;
    std::vector<double> card_local;
    std::vector<double> card_fused;
};

StepSeries average_over_nodes(const std::vector<StepAggregate>& rows) {
    std::map<int, StepAggregate> by_step;
    std::map<int, int> counts;
    for (const StepAggregate& row : rows) {
        StepAggregate& acc = by_step[row.step];
        acc.local_ospa += row.local_ospa;
        acc.fused_ospa += row.fused_ospa;
        acc.card_local += row.card_local;
        acc.card_fused += row.card_fused;
        counts[row.step] += 1;
    }
    StepSeries series;
    for (const auto& [step, acc] : by_step) {
        const double n = counts[step];
        series.step.push_back(step);
        series.local_ospa.push_back(acc.local_ospa / n);
        series.fused_ospa.push_back(acc.fused_ospa / n);
        series.card_local.push_back(acc.card_local / n);
        series.card_fused.push_back(acc.card_fused / n);
    }
    return series;
}

int cmd_run(const RunOptions& opts) {
    Experiment ex;
    if (!opts.config_path.empty()) {
        ex = gcimb::load_experiment(opts.config_path);
    } else {
        // No config file: start from the two-sensor separation study.
        ex.scenario = gcimb::two_sensor_separation_scenario(opts.separation.value_or(8.0),
                                                            opts.snr.value_or(15.0));
    }
    if (opts.seed) ex.seed = *opts.seed;
    if (opts.runs) ex.runs = *opts.runs;
    if (opts.mode) ex.scenario.mode = gcimb::work_mode_from_string(*opts.mode);
    if (opts.snr) ex.scenario.sensor.set_snr_db(*opts.snr);
    if (opts.separation) {
        ex.scenario.truth = gcimb::two_parallel_targets(*opts.separation, ex.scenario.steps);
    }
    gcimb::validate(ex.scenario);
    const nlohmann::json resolved = gcimb::experiment_to_json(ex);

    const MonteCarloSummary summary = gcimb::monte_carlo(ex.scenario, ex.runs, ex.seed);

    std::filesystem::create_directories(opts.out_dir);
    const std::string step_csv = opts.out_dir + "/ospa_by_step.csv";
    const std::string summary_csv = opts.out_dir + "/summary.csv";
    const std::string ospa_svg = opts.out_dir + "/ospa_by_step.svg";
    const std::string card_svg = opts.out_dir + "/cardinality_by_step.svg";
    {
        auto out = gcimb::open_output(step_csv);
        gcimb::write_step_csv(out, summary.per_step, ex.scenario.mode, resolved);
    }
    {
        auto out = gcimb::open_output(summary_csv);
        gcimb::write_summary_csv(out, summary, ex.scenario.mode, resolved);
    }

    const StepSeries series = average_over_nodes(summary.per_step);
    LineChart ospa_chart("Mean OSPA per scan (" + std::to_string(ex.runs) + " runs)",
                         "scan", "OSPA (m)");
    ospa_chart.add({"local", series.step, series.local_ospa});
    ospa_chart.add({"fused", series.step, series.fused_ospa});
    ospa_chart.write(ospa_svg);

    std::vector<double> card_truth;
    card_truth.reserve(series.step.size());
    for (double step : series.step) {
        card_truth.push_back(
            static_cast<double>(ex.scenario.truth.states_at(static_cast<int>(step)).size()));
    }
    LineChart card_chart("Mean cardinality per scan", "scan", "targets");
    card_chart.add({"truth", series.step, card_truth});
    card_chart.add({"local", series.step, series.card_local});
    card_chart.add({"fused", series.step, series.card_fused});
    card_chart.write(card_svg);

    std::printf("mode %s | nodes %d | steps %d | runs %d | seed %llu\n",
                gcimb::to_string(ex.scenario.mode).c_str(),
                ex.scenario.topology.node_count(), ex.scenario.steps, summary.runs,
                static_cast<unsigned long long>(ex.seed));
    std::printf("  mean local OSPA   %.4f m\n", summary.mean_local_ospa);
    std::printf("  mean fused OSPA   %.4f m\n", summary.mean_fused_ospa);
    std::printf("  efficiency        %.3f (OSPA < %.2f)\n", summary.efficiency,
                ex.scenario.efficiency_threshold);
    std::printf("  mean approx error %.6g\n", summary.mean_approx_error);
    std::printf("wrote %s, %s, %s, %s\n", step_csv.c_str(), summary_csv.c_str(),
                ospa_svg.c_str(), card_svg.c_str());
    return 0;
}

/// Index sequences of length n over {0..m-1}, in the order the
/// approximation report lists its terms (lexicographic).
std::vector<std::vector<std::size_t>> index_sequences(std::size_t m, std::size_t n) {
    std::vector<std::vector<std::size_t>> all;
    std::vector<std::size_t> seq;
    std::vector<bool> used(m, false);
    gcimb::detail::for_each_index_sequence(
        m, n, seq, used, [&](const std::vector<std::size_t>& s) { all.push_back(s); });
    return all;
}

int cmd_fig1() {
    // Running example: three Bernoulli tracks with existence 0.8/0.9/0.9 and
    // 1-D particle clouds drawn from N(3, 0.2), N(4, 0.2), N(7, 0.2).
    constexpr int kParticles = 10000;
    constexpr double kOmega = 0.5;
    const double means[] = {3.0, 4.0, 7.0};
    const double rs[] = {0.8, 0.9, 0.9};
    gcimb::MBPosterior mb;
    for (int t = 0; t < 3; ++t) {
        gcimb::Rng rng(static_cast<std::uint64_t>(101 + t));
        std::normal_distribution<double> draw(means[t], std::sqrt(0.2));
        Eigen::MatrixXd centers(1, kParticles);
        for (int i = 0; i < kParticles; ++i) centers(0, i) = draw(rng);
        mb.add_track({rs[t], gcimb::ParticleDensity::from_centers(centers)});
    }

    std::printf("Powered-sum surrogate of the exponentiated multi-Bernoulli density\n");
    std::printf("tracks: r = 0.8, 0.9, 0.9; clouds ~ N(3, 0.2), N(4, 0.2), N(7, 0.2) "
                "(%d particles each); omega = %.1f\n\n",
                kParticles, kOmega);

    const std::vector<std::pair<std::string, std::vector<double>>> hypotheses = {
        {"{}", {}}, {"{3}", {3.0}}, {"{4}", {4.0}}, {"{7}", {7.0}}, {"{4, 7}", {4.0, 7.0}},
    };
    for (const auto& [label, points] : hypotheses) {
        std::vector<Eigen::VectorXd> xhat;
        for (double v : points) {
            Eigen::VectorXd x(1);
            x(0) = v;
            xhat.push_back(x);
        }
        const gcimb::ApproximationReport rep = gcimb::approximation_report(mb, xhat, kOmega);
        const auto sequences = index_sequences(3, xhat.size());

        std::printf("hypothesis X = %s\n", label.c_str());
        std::size_t best = 0;
        for (std::size_t i = 0; i < rep.log_terms.size(); ++i) {
            if (rep.log_terms[i] > rep.log_terms[best]) best = i;
            std::string assignment;
            for (std::size_t j = 0; j < sequences[i].size(); ++j) {
                if (j > 0) assignment += ", ";
                assignment += std::to_string(static_cast<int>(points[j])) + " -> track " +
                              std::to_string(sequences[i][j] + 1);
            }
            if (assignment.empty()) assignment = "(empty product)";
            std::printf("  term %-28s Q*prod p = %.6e\n", assignment.c_str(),
                        std::exp(rep.log_terms[i]));
        }
        std::string dominant = "(empty product)";
        if (!sequences[best].empty()) {
            dominant = sequences[best].size() == 1 ? "track " : "tracks ";
            for (std::size_t j = 0; j < sequences[best].size(); ++j) {
                if (j > 0) dominant += ", ";
                dominant += std::to_string(sequences[best][j] + 1);
            }
        }
        std::printf("  dominant term: %s, share %.8f of the exact density\n", dominant.c_str(),
                    rep.dominant_ratio);
        std::printf("  exact^omega = %.6e, powered sum = %.6e\n", rep.exact_powered,
                    rep.powered_sum);
        std::printf("  abs error = %.6e, rel error = %.6e\n\n", rep.error,
                    rep.exact_powered > 0.0 ? rep.error / rep.exact_powered : 0.0);
    }
    return 0;
}

int cmd_table1(int runs, std::uint64_t seed, double snr_db, const std::string& out_dir) {
    if (runs < 10) {
        std::fprintf(stderr, "error: table1 needs --runs >= 10 for a stable average\n");
        return 1;
    }
    std::printf("Average fused OSPA vs number of sensors "
                "(chain network, 30 scans, SNR %.1f dB, %d runs, seed %llu)\n\n",
                snr_db, runs, static_cast<unsigned long long>(seed));
    std::printf("%-10s %-12s %-12s\n", "sensors", "M1", "M2");

    struct Cell {
        int sensors;
        WorkMode mode;
        MonteCarloSummary summary;
    };
    std::vector<Cell> cells;
    for (int sensors = 1; sensors <= 3; ++sensors) {
        double by_mode[2] = {0.0, 0.0};
        for (WorkMode mode : {WorkMode::M1, WorkMode::M2}) {
            const gcimb::ScenarioConfig config =
                gcimb::sensor_chain_scenario(sensors, mode, snr_db);
            MonteCarloSummary summary = gcimb::monte_carlo(config, runs, seed);
            by_mode[mode == WorkMode::M2] = summary.mean_fused_ospa;
            cells.push_back({sensors, mode, std::move(summary)});
        }
        std::printf("%-10d %-12.4f %-12.4f\n", sensors, by_mode[0], by_mode[1]);
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        Experiment base;
        base.scenario = gcimb::sensor_chain_scenario(3, WorkMode::M1, snr_db);
        base.seed = seed;
        base.runs = runs;
        nlohmann::json resolved = gcimb::experiment_to_json(base);
        resolved["note"] = "rows rerun this base with topology chain(sensors) and the "
                           "listed mode";
        const std::string path = out_dir + "/table1.csv";
        auto out = gcimb::open_output(path);
        out << gcimb::config_comment(resolved);
        out << "sensors,mode,mean_local_ospa,mean_fused_ospa,efficiency\n";
        for (const Cell& cell : cells) {
            out << cell.sensors << ',' << gcimb::to_string(cell.mode) << ','
                << gcimb::format_number(cell.summary.mean_local_ospa) << ','
                << gcimb::format_number(cell.summary.mean_fused_ospa) << ','
                << gcimb::format_number(cell.summary.efficiency) << '\n';
        }
        std::printf("\nwrote %s\n", path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed multi-Bernoulli track-before-detect with GCI fusion"};
    app.require_subcommand(1);

    RunOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "Run a scenario config and write CSV/SVG output");
    run->add_option("--config", run_opts.config_path, "Scenario config (JSON)")
        ->check(CLI::ExistingFile);
    run->add_option("--seed", run_opts.seed, "Base RNG seed (overrides config)");
    run->add_option("--runs", run_opts.runs, "Monte-Carlo runs (overrides config)")
        ->check(CLI::PositiveNumber);
    run->add_option("--mode", run_opts.mode, "Work mode: fuse only (M1) or feed back (M2)")
        ->check(CLI::IsMember({"M1", "M2"}));
    run->add_option("--snr", run_opts.snr, "Peak SNR in dB (overrides config)");
    run->add_option("--de", run_opts.separation,
                    "Rebuild truth as two parallel targets this many meters apart");
    run->add_option("--out-dir", run_opts.out_dir, "Output directory")
        ->capture_default_str();

    CLI::App* fig1 = app.add_subcommand(
        "fig1", "Print the powered-sum approximation study on the three-track example");

    int t1_runs = 50;
    std::uint64_t t1_seed = 1;
    double t1_snr = 15.0;
    std::string t1_out;
    CLI::App* table1 = app.add_subcommand(
        "table1", "Average OSPA for 1/2/3 chained sensors in modes M1 and M2");
    table1->add_option("--runs", t1_runs, "Monte-Carlo runs (>= 10)")->capture_default_str();
    table1->add_option("--seed", t1_seed, "Base RNG seed")->capture_default_str();
    table1->add_option("--snr", t1_snr, "Peak SNR in dB")->capture_default_str();
    table1->add_option("--out-dir", t1_out, "Also write table1.csv here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_opts);
        if (fig1->parsed()) return cmd_fig1();
        if (table1->parsed()) return cmd_table1(t1_runs, t1_seed, t1_snr, t1_out);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
