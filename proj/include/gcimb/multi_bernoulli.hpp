#pragma once

#include "gcimb/fusion_map.hpp"
#include "gcimb/particle_density.hpp"
#include "gcimb/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gcimb {

/// Existence ceiling. A Bernoulli track is never reported fully certain:
/// keeping 1 - r strictly positive keeps log(1 - r) finite, so fusion can
/// still weigh hypotheses in which the track is absent instead of being
/// forced into an all-or-nothing choice.
inline constexpr double kMaxExistence = 1.0 - 1e-9;

/// One potential target: existence probability r plus a spatial density.
struct BernoulliTrack {
    double r = 0.0;
    ParticleDensity density;
};

/// Multi-Bernoulli posterior: an indexed set of independent Bernoulli tracks.
/// Track indices are opaque, contiguous, and re-compacted after pruning.
class MBPosterior {
public:
    MBPosterior() = default;
    explicit MBPosterior(std::vector<BernoulliTrack> tracks) : tracks_(std::move(tracks)) {
        for (const auto& t : tracks_) {
            if (!(t.r >= 0.0 && t.r <= 1.0)) {
                throw std::domain_error("MBPosterior: existence probability outside [0,1]");
            }
        }
    }

    [[nodiscard]] std::size_t track_count() const { return tracks_.size(); }
    [[nodiscard]] bool empty() const { return tracks_.empty(); }
    [[nodiscard]] const BernoulliTrack& track(std::size_t l) const { return tracks_.at(l); }
    [[nodiscard]] BernoulliTrack& track(std::size_t l) { return tracks_.at(l); }
    [[nodiscard]] const std::vector<BernoulliTrack>& tracks() const { return tracks_; }
    [[nodiscard]] std::vector<BernoulliTrack>& tracks() { return tracks_; }

    void add_track(BernoulliTrack t) {
        if (!(t.r >= 0.0 && t.r <= 1.0)) {
            throw std::domain_error("MBPosterior: existence probability outside [0,1]");
        }
        tracks_.push_back(std::move(t));
    }

    /// Expected target count, sum of existence probabilities.
    [[nodiscard]] double expected_cardinality() const {
        double s = 0.0;
        for (const auto& t : tracks_) s += t.r;
        return s;
    }

private:
    std::vector<BernoulliTrack> tracks_;
};

/// Joint existence weight Q^I: the probability that exactly the tracks in I
/// exist — prod_{l in I} r_l * prod_{l not in I} (1 - r_l).
[[nodiscard]] inline double joint_existence_weight(const MBPosterior& mb,
                                                   const std::vector<std::size_t>& index_set) {
    std::vector<bool> in_set(mb.track_count(), false);
    for (std::size_t l : index_set) {
        if (l >= mb.track_count()) {
            throw std::domain_error("joint_existence_weight: unknown track index");
        }
        if (in_set[l]) {
            throw std::domain_error("joint_existence_weight: duplicate track index");
        }
        in_set[l] = true;
    }
    double q = 1.0;
    for (std::size_t l = 0; l < mb.track_count(); ++l) {
        q *= in_set[l] ? mb.track(l).r : 1.0 - mb.track(l).r;
    }
    return q;
}

/// Cardinality distribution P(n), n = 0..M, by iterated convolution of the
/// per-track Bernoulli factors (equals the sum of Q^I over |I| = n).
[[nodiscard]] inline std::vector<double> cardinality_distribution(const MBPosterior& mb) {
    std::vector<double> pmf{1.0};
    for (const auto& t : mb.tracks()) {
        std::vector<double> next(pmf.size() + 1, 0.0);
        for (std::size_t n = 0; n < pmf.size(); ++n) {
            next[n] += pmf[n] * (1.0 - t.r);
            next[n + 1] += pmf[n] * t.r;
        }
        pmf = std::move(next);
    }
    return pmf;
}

/// First-order moment (PHD) of an MB posterior: v(x) = sum_l r_l p_l(x).
[[nodiscard]] inline double phd_mb(const MBPosterior& mb, const Eigen::VectorXd& x) {
    double v = 0.0;
    for (const auto& t : mb.tracks()) {
        if (t.r > 0.0 && !t.density.empty()) v += t.r * t.density.eval(x);
    }
    return v;
}

/// One hypothesis of a generalized multi-Bernoulli posterior: the fused track
/// subset I1 with its fusion map theta, the hypothesis weight, and the fused
/// per-track densities and normalizers (aligned with map.sources()).
struct GMBHypothesis {
    FusionMap map;
    double weight = 0.0;
    std::vector<ParticleDensity> fused_densities;
    std::vector<double> normalizers;
};

/// Generalized multi-Bernoulli posterior: a weighted hypothesis mixture over
/// (track subset, fusion map) pairs; the intermediate fused form before
/// moment matching brings it back to a plain MB posterior.
class GMBPosterior {
public:
    GMBPosterior() = default;
    GMBPosterior(std::vector<GMBHypothesis> hypotheses, std::size_t source_track_count)
        : hypotheses_(std::move(hypotheses)), source_track_count_(source_track_count) {}

    [[nodiscard]] const std::vector<GMBHypothesis>& hypotheses() const { return hypotheses_; }
    [[nodiscard]] std::vector<GMBHypothesis>& hypotheses() { return hypotheses_; }
    /// Size of the index space L1 the hypotheses draw their subsets from.
    [[nodiscard]] std::size_t source_track_count() const { return source_track_count_; }

    [[nodiscard]] double weight_sum() const {
        double s = 0.0;
        for (const auto& h : hypotheses_) s += h.weight;
        return s;
    }

    void normalize() {
        const double s = weight_sum();
        if (!(s > 0.0)) {
            throw std::domain_error("GMBPosterior::normalize: zero weight sum");
        }
        for (auto& h : hypotheses_) h.weight /= s;
    }

    /// Expected cardinality sum_h w_h |I1_h|.
    [[nodiscard]] double expected_cardinality() const {
        double s = 0.0;
        for (const auto& h : hypotheses_) s += h.weight * static_cast<double>(h.map.size());
        return s;
    }

private:
    std::vector<GMBHypothesis> hypotheses_;
    std::size_t source_track_count_ = 0;
};

/// PHD of a GMB posterior: v(x) = sum_l sum_h 1_{I1_h}(l) w_h p_h,l(x).
[[nodiscard]] inline double phd_gmb(const GMBPosterior& gmb, const Eigen::VectorXd& x) {
    double v = 0.0;
    for (const auto& h : gmb.hypotheses()) {
        if (h.weight <= 0.0) continue;
        for (const auto& density : h.fused_densities) {
            v += h.weight * density.eval(x);
        }
    }
    return v;
}

/// Axis-aligned box, the building block of particle HPD regions.
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    [[nodiscard]] bool intersects(const Box& other) const {
        for (Eigen::Index k = 0; k < lo.size(); ++k) {
            if (hi(k) < other.lo(k) || other.hi(k) < lo(k)) return false;
        }
        return true;
    }
};

/// Result of the highest-posterior-density separation check.
struct SeparationReport {
    double lambda = 0.0;
    /// Per track: union of boxes around the top-density particles.
    std::vector<std::vector<Box>> regions;
    bool separated = false;
};

/// Approximate each track's lambda-HPD region as the union of boxes around
/// its highest-density particles (half-width = per-dimension kernel std) and
/// report whether all pairwise region intersections are empty.
[[nodiscard]] inline SeparationReport check_separation(const MBPosterior& mb, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::domain_error("check_separation: lambda must lie in (0,1)");
    }
    SeparationReport report;
    report.lambda = lambda;
    report.regions.reserve(mb.track_count());

    for (const auto& t : mb.tracks()) {
        if (t.density.size() < 2) {
            throw std::domain_error("check_separation: tracks need at least 2 particles");
        }
        const Eigen::MatrixXd centers = t.density.centers_concat();
        Eigen::VectorXd weights = t.density.weights_concat();
        weights /= weights.sum();
        const Eigen::VectorXd half = t.density.kernel_std();

        // Rank particles by their (KDE) density, highest first.
        std::vector<Eigen::Index> order(static_cast<std::size_t>(centers.cols()));
        std::vector<double> dens(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = static_cast<Eigen::Index>(i);
            dens[i] = t.density.log_eval(centers.col(static_cast<Eigen::Index>(i)));
        }
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return dens[static_cast<std::size_t>(a)] > dens[static_cast<std::size_t>(b)];
        });

        // Accumulate boxes until at least lambda of the mass is covered.
        std::vector<Box> region;
        double covered = 0.0;
        for (Eigen::Index idx : order) {
            region.push_back(Box{centers.col(idx) - half, centers.col(idx) + half});
            covered += weights(idx);
            if (covered >= lambda) break;
        }
        report.regions.push_back(std::move(region));
    }

    report.separated = true;
    for (std::size_t a = 0; a + 1 < report.regions.size() && report.separated; ++a) {
        for (std::size_t b = a + 1; b < report.regions.size() && report.separated; ++b) {
            for (const Box& ba : report.regions[a]) {
                bool hit = false;
                for (const Box& bb : report.regions[b]) {
                    if (ba.intersects(bb)) {
                        hit = true;
                        break;
                    }
                }
                if (hit) {
                    report.separated = false;
                    break;
                }
            }
        }
    }
    return report;
}

} // namespace gcimb
