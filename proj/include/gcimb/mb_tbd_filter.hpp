#pragma once

#include "gcimb/image_model.hpp"
#include "gcimb/log_sum_exp.hpp"
#include "gcimb/multi_bernoulli.hpp"
#include "gcimb/particle_density.hpp"
#include "gcimb/rng.hpp"
#include "gcimb/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace gcimb {

/// Target kinematics: constant-velocity transition with white acceleration
/// noise, plus the per-scan survival probability.  The default noise std is
/// large enough to re-diversify a resampled cloud within a couple of scans;
/// much smaller values risk permanent divergence after weight degeneracy.
struct MotionModel {
    double T = 1.0;                 // scan period (s)
    double process_noise_std = 0.2; // acceleration noise per axis (m/s^2)
    double p_e = 0.95;              // survival probability
};

/// Local-filter knobs.
struct FilterConfig {
    int particles_per_track = 200;
    double prune_threshold = 1e-3;     // drop tracks below this existence
    double merge_distance = 2.0;       // merge tracks with closer means (m)
    double existence_threshold = 0.5;  // report tracks above this existence
    double initial_existence = 0.5;    // existence at track initialization
    // Uniform init box around truth (m). Kept to about one cell: a sparser
    // box leaves too few of the particles inside the likelihood support, and
    // the early posterior then rides a single offset lineage for scans.
    double init_position_halfwidth = 1.0;
    double init_velocity_var = 0.25;   // Gaussian init spread around truth vel
};

/// Existence update ratio: r' = r zhat / (1 - r + r zhat), computed from
/// log(zhat) in a saturation-safe logistic form and clamped below the
/// existence ceiling.
[[nodiscard]] inline double existence_update(double r, double log_zhat) {
    if (r <= 0.0) return 0.0;
    if (log_zhat == kLogZero) return 0.0;
    if (r >= kMaxExistence) return kMaxExistence;
    const double t = std::log(r) - std::log1p(-r) + log_zhat;
    return std::min(1.0 / (1.0 + std::exp(-t)), kMaxExistence);
}

/// Prediction: survival-scaled existence and constant-velocity particle
/// transition x' = F x + [T^2/2 w, T w] with w the acceleration noise.
[[nodiscard]] inline MBPosterior predict(const MBPosterior& mb, const MotionModel& motion,
                                         Rng& rng) {
    const Eigen::Matrix4d F = cv_transition(motion.T);
    std::normal_distribution<double> accel(0.0, motion.process_noise_std);
    MBPosterior out;
    for (const auto& t : mb.tracks()) {
        if (t.density.dim() != 4) {
            throw std::domain_error("predict: constant-velocity model needs 4-D states");
        }
        Eigen::MatrixXd c = t.density.centers_concat();
        const Eigen::VectorXd w = t.density.weights_concat();
        for (Eigen::Index i = 0; i < c.cols(); ++i) {
            const double wx = accel(rng);
            const double wy = accel(rng);
            Eigen::Vector4d x = F * c.col(i);
            x(0) += 0.5 * motion.T * motion.T * wx;
            x(1) += 0.5 * motion.T * motion.T * wy;
            x(2) += motion.T * wx;
            x(3) += motion.T * wy;
            c.col(i) = x;
        }
        out.add_track({t.r * motion.p_e,
                       ParticleDensity::from_weighted(std::move(c), w)});
    }
    return out;
}

/// Image-likelihood update: particle weights scale by the likelihood ratio
/// g_z, the existence by the predicted-measurement factor
/// zhat = sum_m w_m g_z(x_m). All arithmetic in log domain.
[[nodiscard]] inline MBPosterior update(const MBPosterior& mb, const ImageFrame& frame,
                                        const SensorModel& sensor) {
    MBPosterior out;
    for (const auto& t : mb.tracks()) {
        const Eigen::MatrixXd c = t.density.centers_concat();
        const Eigen::VectorXd w = t.density.weights_concat();
        std::vector<double> logw(static_cast<std::size_t>(c.cols()));
        for (Eigen::Index i = 0; i < c.cols(); ++i) {
            const double lw = w(i) > 0.0 ? std::log(w(i)) : kLogZero;
            logw[static_cast<std::size_t>(i)] =
                lw + log_likelihood_ratio(frame, c.col(i), sensor);
        }
        const double log_zhat = log_sum_exp(logw);
        const double r = existence_update(t.r, log_zhat);
        if (log_zhat == kLogZero) {
            // No particle carries weight; keep the cloud, existence dies.
            out.add_track({0.0, t.density});
            continue;
        }
        Eigen::VectorXd neww(c.cols());
        for (Eigen::Index i = 0; i < c.cols(); ++i) {
            neww(i) = std::exp(logw[static_cast<std::size_t>(i)] - log_zhat);
        }
        out.add_track({r, t.density.reweighted(neww)});
    }
    return out;
}

/// Systematic resampling of one track to `count` equal-weight particles.
/// A track whose weights carry no mass is flagged dead (r = 0).
[[nodiscard]] inline BernoulliTrack resample_track(const BernoulliTrack& track, int count,
                                                   Rng& rng) {
    if (track.density.empty() || !(track.density.mass() > 0.0)) {
        return {0.0, track.density};
    }
    return {track.r, track.density.resample(count, rng)};
}

[[nodiscard]] inline MBPosterior resample_tracks(const MBPosterior& mb, int count, Rng& rng) {
    MBPosterior out;
    for (const auto& t : mb.tracks()) out.add_track(resample_track(t, count, rng));
    return out;
}

/// Redraw one track's cloud from its own kernel density estimate: every atom
/// is perturbed by the per-dimension kernel bandwidth. This breaks the
/// duplicate lineages systematic resampling leaves behind, so repeated scans
/// cannot collapse a cloud onto a single support point.
[[nodiscard]] inline BernoulliTrack regularize_track(const BernoulliTrack& track, Rng& rng) {
    if (track.density.empty() || track.density.size() < 2) return track;
    Eigen::MatrixXd centers = track.density.centers_concat();
    const Eigen::VectorXd bandwidth = track.density.kernel_std();
    std::normal_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index m = 0; m < centers.cols(); ++m) {
        for (Eigen::Index d = 0; d < centers.rows(); ++d) {
            centers(d, m) += bandwidth(d) * unit(rng);
        }
    }
    return {track.r, ParticleDensity::from_weighted(std::move(centers),
                                                    track.density.weights_concat())};
}

[[nodiscard]] inline MBPosterior regularize_tracks(const MBPosterior& mb, Rng& rng) {
    MBPosterior out;
    for (const auto& t : mb.tracks()) out.add_track(regularize_track(t, rng));
    return out;
}

namespace detail {

/// Distance between track means over the position components (the leading
/// min(2, d) state dimensions).
[[nodiscard]] inline double mean_position_distance(const ParticleDensity& a,
                                                   const ParticleDensity& b) {
    const Eigen::Index k = std::min<Eigen::Index>(2, a.dim());
    return (a.mean().head(k) - b.mean().head(k)).norm();
}

} // namespace detail

/// Merge tracks whose cloud means are too close (existence adds up, capped
/// at 1; particles pool with existence-proportional mass), then drop tracks
/// whose existence fell below the prune threshold. Runs to a fixed point, so
/// applying it twice changes nothing.
[[nodiscard]] inline MBPosterior merge_and_prune(const MBPosterior& mb,
                                                 const FilterConfig& config) {
    std::vector<BernoulliTrack> tracks = mb.tracks();

    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < tracks.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < tracks.size() && !merged; ++j) {
                if (detail::mean_position_distance(tracks[i].density, tracks[j].density)
                    >= config.merge_distance) {
                    continue;
                }
                const double ra = tracks[i].r, rb = tracks[j].r;
                const double sum = ra + rb;
                BernoulliTrack pooled;
                pooled.r = std::min(kMaxExistence, sum);
                if (sum > 0.0) {
                    pooled.density = ParticleDensity::mixture(
                        {{ra / sum, &tracks[i].density}, {rb / sum, &tracks[j].density}});
                } else {
                    pooled.density = ParticleDensity::mixture(
                        {{0.5, &tracks[i].density}, {0.5, &tracks[j].density}});
                }
                tracks[i] = std::move(pooled);
                tracks.erase(tracks.begin() + static_cast<std::ptrdiff_t>(j));
                merged = true;
            }
        }
    }

    std::vector<BernoulliTrack> kept;
    for (auto& t : tracks) {
        if (t.r >= config.prune_threshold) kept.push_back(std::move(t));
    }
    return MBPosterior(std::move(kept));
}

/// State readout: the weighted particle mean of every track whose existence
/// exceeds the report threshold.
[[nodiscard]] inline std::vector<State> extract_estimates(const MBPosterior& mb,
                                                          const FilterConfig& config) {
    std::vector<State> estimates;
    for (const auto& t : mb.tracks()) {
        if (t.r > config.existence_threshold && !t.density.empty()) {
            estimates.push_back(t.density.mean());
        }
    }
    return estimates;
}

/// One-time track initialization around known starting positions (the model
/// has no births): position uniform within a box around each truth state,
/// velocity Gaussian around the truth velocity.
[[nodiscard]] inline MBPosterior initialize_tracks(const std::vector<State>& truth,
                                                   const FilterConfig& config, Rng& rng) {
    std::uniform_real_distribution<double> box(-config.init_position_halfwidth,
                                               config.init_position_halfwidth);
    std::normal_distribution<double> vel(0.0, std::sqrt(config.init_velocity_var));
    MBPosterior mb;
    for (const State& x : truth) {
        Eigen::MatrixXd c(4, config.particles_per_track);
        for (int i = 0; i < config.particles_per_track; ++i) {
            c(0, i) = x(0) + box(rng);
            c(1, i) = x(1) + box(rng);
            c(2, i) = x(2) + vel(rng);
            c(3, i) = x(3) + vel(rng);
        }
        mb.add_track({config.initial_existence, ParticleDensity::from_centers(std::move(c))});
    }
    return mb;
}

} // namespace gcimb
