#pragma once

#include <Eigen/Dense>

namespace gcimb {

/// Single-target state; the tracking layer uses the planar convention
/// x = [p_x, p_y, v_x, v_y] (position in m, velocity in m/s), but lower
/// layers (densities, fusion) work for any state dimension.
using State = Eigen::VectorXd;

/// Dimension of the tracking-layer state.
inline constexpr int kTrackingStateDim = 4;

/// One particle of an empirical density: a state plus a nonnegative weight.
struct WeightedParticle {
    State state;
    double weight = 0.0;
};

[[nodiscard]] inline State make_state(double px, double py, double vx, double vy) {
    State x(4);
    x << px, py, vx, vy;
    return x;
}

/// Constant-velocity transition matrix for scan period T (4-D states).
[[nodiscard]] inline Eigen::Matrix4d cv_transition(double T) {
    Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
    F(0, 2) = T;
    F(1, 3) = T;
    return F;
}

} // namespace gcimb
