#pragma once

// Ready-made experiment configurations: the two-sensor target-separation
// study and the sensor-chain comparison of fused OSPA vs. network size.
// Trajectories are straight constant-velocity lanes chosen to stay well
// inside the default 50 x 50 m surveillance region for 30 scans.

#include <stdexcept>
#include <utility>
#include <vector>

#include "sensor_network.hpp"

namespace gcimb {

// ---- Ground-truth builders ----

/// Two targets moving in parallel with identical velocity (1, 0) m/s,
/// vertically separated by `separation` meters; both alive from scan 1.
/// Equal velocities make the full-state distance equal the positional one.
[[nodiscard]] inline GroundTruth two_parallel_targets(double separation, int steps) {
    if (!(separation > 0.0)) {
        throw std::invalid_argument("two_parallel_targets: separation must be positive");
    }
    if (steps < 1) throw std::invalid_argument("two_parallel_targets: steps must be >= 1");
    GroundTruth truth;
    for (const double y0 : {25.0 - separation / 2.0, 25.0 + separation / 2.0}) {
        GroundTruth::Target target;
        target.birth = 1;
        for (int k = 1; k <= steps; ++k) {
            State x(4);
            x << 10.0 + (k - 1) * 1.0, y0, 1.0, 0.0;
            target.states.push_back(std::move(x));
        }
        truth.targets.push_back(std::move(target));
    }
    return truth;
}

/// Three constant-velocity targets in separated lanes (pairwise distance
/// stays above ~8 m over 30 scans), all alive from scan 1.
[[nodiscard]] inline GroundTruth three_lane_targets(int steps) {
    if (steps < 1) throw std::invalid_argument("three_lane_targets: steps must be >= 1");
    struct Lane {
        double px, py, vx, vy;
    };
    const std::vector<Lane> lanes = {
        {10.0, 8.0, 1.0, 0.3},
        {8.0, 25.0, 1.1, 0.0},
        {10.0, 42.0, 1.0, -0.3},
    };
    GroundTruth truth;
    for (const Lane& lane : lanes) {
        GroundTruth::Target target;
        target.birth = 1;
        for (int k = 1; k <= steps; ++k) {
            State x(4);
            x << lane.px + (k - 1) * lane.vx, lane.py + (k - 1) * lane.vy, lane.vx,
                lane.vy;
            target.states.push_back(std::move(x));
        }
        truth.targets.push_back(std::move(target));
    }
    return truth;
}

// ---- Scenario presets ----

/// Two connected sensors tracking two parallel targets `separation` meters
/// apart: 3x3 illumination templates, 30 scans. Track merging is disabled:
/// with exactly two initialized tracks and no births there is nothing
/// duplicated to merge, and at small separations both clouds legitimately
/// crowd the joint blur blob without being one target.
[[nodiscard]] inline ScenarioConfig two_sensor_separation_scenario(double separation,
                                                                   double snr_db = 15.0) {
    ScenarioConfig config;
    config.sensor.template_radius = 1;
    config.sensor.set_snr_db(snr_db);
    config.filter.merge_distance = 0.0;
    config.topology = NetworkTopology(2, {{0, 1}});
    config.steps = 30;
    config.truth = two_parallel_targets(separation, config.steps);
    return config;
}

/// A path of 1..n sensors tracking the three-lane truth: 5x5 illumination
/// templates, 30 scans. In a 3-chain the middle sensor fuses both ends, so
/// it performs two pairwise fusions per scan.
[[nodiscard]] inline ScenarioConfig sensor_chain_scenario(int sensors, WorkMode mode,
                                                          double snr_db = 15.0) {
    if (sensors < 1) {
        throw std::invalid_argument("sensor_chain_scenario: sensors must be >= 1");
    }
    ScenarioConfig config;
    config.sensor.template_radius = 2;
    config.sensor.set_snr_db(snr_db);
    config.topology = NetworkTopology::chain(sensors);
    config.mode = mode;
    config.steps = 30;
    config.truth = three_lane_targets(config.steps);
    return config;
}

}  // namespace gcimb
