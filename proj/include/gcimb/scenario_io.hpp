#pragma once

#include "gcimb/scenarios.hpp"
#include "gcimb/sensor_network.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gcimb {

/// A scenario plus the replication knobs that live outside the simulation
/// itself: the base RNG seed and the Monte-Carlo run count.
struct Experiment {
    ScenarioConfig scenario;
    std::uint64_t seed = 1;
    int runs = 1;
};

[[nodiscard]] inline WorkMode work_mode_from_string(const std::string& text) {
    if (text == "M1") return WorkMode::M1;
    if (text == "M2") return WorkMode::M2;
    throw std::invalid_argument("config: mode must be \"M1\" or \"M2\", got \"" + text + "\"");
}

namespace detail {

/// Fails loudly on typos: every object key must be in the allowed list.
inline void reject_unknown_keys(const nlohmann::json& obj, const char* context,
                                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) {
            throw std::invalid_argument(std::string("config: unknown field \"") + context +
                                        "." + item.key() + "\"");
        }
    }
}

template <typename T>
[[nodiscard]] T field_or(const nlohmann::json& obj, const char* key, T fallback,
                         const char* context) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(std::string("config: field \"") + context + "." + key +
                                    "\" has the wrong type");
    }
}

[[nodiscard]] inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                                   const char* context) {
    if (!obj.contains(key)) {
        throw std::invalid_argument(std::string("config: missing required field \"") + context +
                                    "." + key + "\"");
    }
    return obj.at(key);
}

[[nodiscard]] inline GroundTruth truth_from_json(const nlohmann::json& node, int steps) {
    reject_unknown_keys(node, "truth", {"targets", "parallel_pair", "three_lanes"});
    if (node.contains("targets") + node.contains("parallel_pair") +
            node.contains("three_lanes") !=
        1) {
        throw std::invalid_argument(
            "config: truth needs exactly one of \"targets\", \"parallel_pair\", "
            "\"three_lanes\"");
    }
    if (node.contains("parallel_pair")) {
        const nlohmann::json& pp = node.at("parallel_pair");
        reject_unknown_keys(pp, "truth.parallel_pair", {"separation"});
        const double sep =
            require(pp, "separation", "truth.parallel_pair").get<double>();
        return two_parallel_targets(sep, steps);
    }
    if (node.contains("three_lanes")) {
        reject_unknown_keys(node.at("three_lanes"), "truth.three_lanes", {});
        return three_lane_targets(steps);
    }

    GroundTruth truth;
    for (const nlohmann::json& tj : node.at("targets")) {
        reject_unknown_keys(tj, "truth.targets[]", {"birth", "states"});
        GroundTruth::Target target;
        target.birth = field_or(tj, "birth", 1, "truth.targets[]");
        for (const nlohmann::json& sj : require(tj, "states", "truth.targets[]")) {
            if (!sj.is_array() || sj.size() != 4) {
                throw std::invalid_argument(
                    "config: truth.targets[].states entries must be [px, py, vx, vy]");
            }
            State x(4);
            for (int d = 0; d < 4; ++d) x(d) = sj.at(static_cast<std::size_t>(d)).get<double>();
            target.states.push_back(std::move(x));
        }
        truth.targets.push_back(std::move(target));
    }
    return truth;
}

[[nodiscard]] inline nlohmann::json truth_to_json(const GroundTruth& truth) {
    nlohmann::json targets = nlohmann::json::array();
    for (const GroundTruth::Target& target : truth.targets) {
        nlohmann::json states = nlohmann::json::array();
        for (const State& x : target.states) {
            states.push_back({x(0), x(1), x(2), x(3)});
        }
        targets.push_back({{"birth", target.birth}, {"states", std::move(states)}});
    }
    return {{"targets", std::move(targets)}};
}

} // namespace detail

/// Build an experiment from its JSON form.  `sensor.snr_db` and a truth block
/// are required; every other field falls back to the library default and is
/// re-emitted by experiment_to_json, so output files always carry the full
/// resolved configuration.
[[nodiscard]] inline Experiment experiment_from_json(const nlohmann::json& root) {
    using detail::field_or;
    using detail::reject_unknown_keys;
    using detail::require;
    if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
    reject_unknown_keys(root, "$",
                        {"seed", "runs", "mode", "steps", "efficiency_threshold",
                         "feedback_retention_distance", "shared_frames", "sensor",
                         "motion", "filter", "fusion", "ospa", "topology", "truth"});

    Experiment ex;
    ex.seed = field_or<std::uint64_t>(root, "seed", 1, "$");
    ex.runs = field_or(root, "runs", 1, "$");
    ScenarioConfig& sc = ex.scenario;
    sc.steps = field_or(root, "steps", sc.steps, "$");
    sc.efficiency_threshold =
        field_or(root, "efficiency_threshold", sc.efficiency_threshold, "$");
    sc.feedback_retention_distance = field_or(root, "feedback_retention_distance",
                                              sc.feedback_retention_distance, "$");
    sc.shared_frames = field_or(root, "shared_frames", sc.shared_frames, "$");
    if (root.contains("mode")) {
        sc.mode = work_mode_from_string(field_or<std::string>(root, "mode", "M1", "$"));
    }

    const nlohmann::json& sj = require(root, "sensor", "$");
    reject_unknown_keys(sj, "sensor",
                        {"grid_width", "grid_height", "dx", "dy", "snr_db", "noise_power",
                         "blur", "template_radius"});
    sc.sensor.grid_width = field_or(sj, "grid_width", sc.sensor.grid_width, "sensor");
    sc.sensor.grid_height = field_or(sj, "grid_height", sc.sensor.grid_height, "sensor");
    sc.sensor.dx = field_or(sj, "dx", sc.sensor.dx, "sensor");
    sc.sensor.dy = field_or(sj, "dy", sc.sensor.dy, "sensor");
    sc.sensor.noise_power = field_or(sj, "noise_power", sc.sensor.noise_power, "sensor");
    sc.sensor.blur = field_or(sj, "blur", sc.sensor.blur, "sensor");
    sc.sensor.template_radius =
        field_or(sj, "template_radius", sc.sensor.template_radius, "sensor");
    sc.sensor.set_snr_db(require(sj, "snr_db", "sensor").get<double>());

    if (root.contains("motion")) {
        const nlohmann::json& mj = root.at("motion");
        reject_unknown_keys(mj, "motion", {"scan_period", "process_noise_std", "p_e"});
        sc.motion.T = field_or(mj, "scan_period", sc.motion.T, "motion");
        sc.motion.process_noise_std =
            field_or(mj, "process_noise_std", sc.motion.process_noise_std, "motion");
        sc.motion.p_e = field_or(mj, "p_e", sc.motion.p_e, "motion");
    }
    if (root.contains("filter")) {
        const nlohmann::json& fj = root.at("filter");
        reject_unknown_keys(fj, "filter",
                            {"particles_per_track", "prune_threshold", "merge_distance",
                             "existence_threshold", "initial_existence",
                             "init_position_halfwidth", "init_velocity_var"});
        sc.filter.particles_per_track =
            field_or(fj, "particles_per_track", sc.filter.particles_per_track, "filter");
        sc.filter.prune_threshold =
            field_or(fj, "prune_threshold", sc.filter.prune_threshold, "filter");
        sc.filter.merge_distance =
            field_or(fj, "merge_distance", sc.filter.merge_distance, "filter");
        sc.filter.existence_threshold =
            field_or(fj, "existence_threshold", sc.filter.existence_threshold, "filter");
        sc.filter.initial_existence =
            field_or(fj, "initial_existence", sc.filter.initial_existence, "filter");
        sc.filter.init_position_halfwidth = field_or(
            fj, "init_position_halfwidth", sc.filter.init_position_halfwidth, "filter");
        sc.filter.init_velocity_var =
            field_or(fj, "init_velocity_var", sc.filter.init_velocity_var, "filter");
    }
    if (root.contains("fusion")) {
        const nlohmann::json& fj = root.at("fusion");
        reject_unknown_keys(
            fj, "fusion",
            {"particles_out", "gate_bandwidths", "exhaustive_max_tracks", "weight_floor"});
        sc.fusion.particles_out =
            field_or(fj, "particles_out", sc.fusion.particles_out, "fusion");
        sc.fusion.gate_bandwidths =
            field_or(fj, "gate_bandwidths", sc.fusion.gate_bandwidths, "fusion");
        sc.fusion.exhaustive_max_tracks =
            field_or(fj, "exhaustive_max_tracks", sc.fusion.exhaustive_max_tracks, "fusion");
        sc.fusion.weight_floor = field_or(fj, "weight_floor", sc.fusion.weight_floor, "fusion");
    }
    if (root.contains("ospa")) {
        const nlohmann::json& oj = root.at("ospa");
        reject_unknown_keys(oj, "ospa", {"cutoff", "order"});
        sc.ospa_params.c = field_or(oj, "cutoff", sc.ospa_params.c, "ospa");
        sc.ospa_params.p = field_or(oj, "order", sc.ospa_params.p, "ospa");
    }
    if (root.contains("topology")) {
        const nlohmann::json& tj = root.at("topology");
        reject_unknown_keys(tj, "topology", {"nodes", "edges"});
        const int nodes = field_or(tj, "nodes", 1, "topology");
        std::vector<std::pair<int, int>> edges;
        for (const nlohmann::json& ej : field_or(tj, "edges", nlohmann::json::array(),
                                                 "topology")) {
            if (!ej.is_array() || ej.size() != 2) {
                throw std::invalid_argument("config: topology.edges entries must be [a, b]");
            }
            edges.emplace_back(ej.at(0).get<int>(), ej.at(1).get<int>());
        }
        sc.topology = NetworkTopology(nodes, edges);
    }
    sc.truth = detail::truth_from_json(require(root, "truth", "$"), sc.steps);
    return ex;
}

/// The fully resolved experiment, defaults included — the auditable form that
/// gets embedded into every output file.
[[nodiscard]] inline nlohmann::json experiment_to_json(const Experiment& ex) {
    const ScenarioConfig& sc = ex.scenario;
    nlohmann::json edges = nlohmann::json::array();
    for (int a = 0; a < sc.topology.node_count(); ++a) {
        for (int b : sc.topology.neighbors(a)) {
            if (a < b) edges.push_back({a, b});
        }
    }
    return {
        {"seed", ex.seed},
        {"runs", ex.runs},
        {"mode", to_string(sc.mode)},
        {"steps", sc.steps},
        {"efficiency_threshold", sc.efficiency_threshold},
        {"feedback_retention_distance", sc.feedback_retention_distance},
        {"shared_frames", sc.shared_frames},
        {"sensor",
         {{"grid_width", sc.sensor.grid_width},
          {"grid_height", sc.sensor.grid_height},
          {"dx", sc.sensor.dx},
          {"dy", sc.sensor.dy},
          {"snr_db", sc.sensor.snr_db()},
          {"noise_power", sc.sensor.noise_power},
          {"blur", sc.sensor.blur},
          {"template_radius", sc.sensor.template_radius}}},
        {"motion",
         {{"scan_period", sc.motion.T},
          {"process_noise_std", sc.motion.process_noise_std},
          {"p_e", sc.motion.p_e}}},
        {"filter",
         {{"particles_per_track", sc.filter.particles_per_track},
          {"prune_threshold", sc.filter.prune_threshold},
          {"merge_distance", sc.filter.merge_distance},
          {"existence_threshold", sc.filter.existence_threshold},
          {"initial_existence", sc.filter.initial_existence},
          {"init_position_halfwidth", sc.filter.init_position_halfwidth},
          {"init_velocity_var", sc.filter.init_velocity_var}}},
        {"fusion",
         {{"particles_out", sc.fusion.particles_out},
          {"gate_bandwidths", sc.fusion.gate_bandwidths},
          {"exhaustive_max_tracks", sc.fusion.exhaustive_max_tracks},
          {"weight_floor", sc.fusion.weight_floor}}},
        {"ospa", {{"cutoff", sc.ospa_params.c}, {"order", sc.ospa_params.p}}},
        {"topology", {{"nodes", sc.topology.node_count()}, {"edges", std::move(edges)}}},
        {"truth", detail::truth_to_json(sc.truth)},
    };
}

/// Parse an experiment from a JSON file.  Syntax errors surface with the
/// parser's line/column diagnostic; schema errors name the offending field.
[[nodiscard]] inline Experiment load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open \"" + path + "\"");
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& err) {
        throw std::invalid_argument("config: " + path + ": " + err.what());
    }
    return experiment_from_json(root);
}

} // namespace gcimb
