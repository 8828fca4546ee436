#pragma once

#include "gcimb/fusion_map.hpp"
#include "gcimb/log_sum_exp.hpp"
#include "gcimb/multi_bernoulli.hpp"
#include "gcimb/particle_density.hpp"
#include "gcimb/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gcimb {

// ---- Types ----

/// Relative fusion weights of the two posteriors; nonnegative, summing to 1.
struct FusionWeights {
    double w1 = 0.5;
    double w2 = 0.5;
};

/// Knobs for hypothesis truncation and fused-density compaction.
struct FusionConfig {
    /// Particle count of each resampled pairwise-fused density.
    std::size_t particles_out = 200;
    /// Pair admissibility gate: per-dimension mean gap allowance, in summed
    /// kernel standard deviations.  Gating only kicks in above
    /// `exhaustive_max_tracks`; smaller problems are enumerated exhaustively.
    double gate_bandwidths = 6.0;
    std::size_t exhaustive_max_tracks = 6;
    /// Hypotheses below this weight are dropped after normalization.
    double weight_floor = 1e-6;
};

/// Fused density and normalizer of one track pair.  `feasible` is false when
/// the normalizer underflows to zero (disjoint supports).
struct PairFusionResult {
    ParticleDensity density;
    double z = 0.0;
    double log_z = kLogZero;
    bool feasible = false;
};

/// Both forms of the fused posterior: the hypothesis mixture and its
/// first-moment-matched MB reduction.
struct FusionOutput {
    GMBPosterior gmb;
    MBPosterior mb;
};

namespace detail {

inline void check_fusion_weights(const FusionWeights& w) {
    if (!(w.w1 >= 0.0 && w.w2 >= 0.0 && std::abs(w.w1 + w.w2 - 1.0) <= 1e-9)) {
        throw std::invalid_argument("FusionWeights: need nonnegative weights summing to 1");
    }
}

/// w * log_value with the 0^0 = 1 convention (w = 0 annihilates -inf).
[[nodiscard]] inline double powered_log(double log_value, double w) {
    return w == 0.0 ? 0.0 : w * log_value;
}

} // namespace detail

// ---- Fusion-map enumeration ----

/// All injective maps from the index subset `sources` into {0..target_count-1},
/// in lexicographic order of their target tuples.  Empty `sources` yields the
/// single empty map; |sources| > target_count yields no maps.
[[nodiscard]] inline std::vector<FusionMap> enumerate_fusion_maps(
    const std::vector<std::size_t>& sources, std::size_t target_count) {
    std::vector<FusionMap> maps;
    if (sources.size() > target_count) return maps;

    std::vector<std::size_t> targets;
    std::vector<bool> used(target_count, false);
    targets.reserve(sources.size());
    const auto recurse = [&](const auto& self) -> void {
        if (targets.size() == sources.size()) {
            maps.emplace_back(sources, targets);
            return;
        }
        for (std::size_t j = 0; j < target_count; ++j) {
            if (used[j]) continue;
            used[j] = true;
            targets.push_back(j);
            self(self);
            targets.pop_back();
            used[j] = false;
        }
    };
    recurse(recurse);
    return maps;
}

// ---- Pairwise density fusion ----

/// Fuse two track densities p1^w1 * p2^w2 by importance sampling over the
/// union of their particle supports: each union point x_m, drawn from the
/// mixture (L1 p_1 + L2 p_2)/(L1 + L2), gets the unnormalized weight
///   zeta_m = p_1(x_m)^w1 p_2(x_m)^w2 / (L1 p_1(x_m) + L2 p_2(x_m)),
/// the normalizer estimate is Z = sum_m zeta_m, and the fused density is the
/// normalized weighted union, resampled to `out_count` particles (0 means
/// p1's particle count).  Densities are evaluated through their kernel fits.
[[nodiscard]] inline PairFusionResult fuse_track_pair(const ParticleDensity& p1,
                                                      const ParticleDensity& p2,
                                                      const FusionWeights& w, Rng& rng,
                                                      std::size_t out_count = 0) {
    detail::check_fusion_weights(w);
    if (p1.empty() || p2.empty()) {
        throw std::domain_error("fuse_track_pair: both densities must be nonempty");
    }
    if (p1.dim() != p2.dim()) {
        throw std::invalid_argument("fuse_track_pair: dimension mismatch");
    }
    if (&p1 == &p2) {
        // Exact identity: p^w1 p^w2 = p and Z = 1.  Short-circuiting keeps
        // self-fusion bit-exact (r cannot drift across thresholds) and skips
        // the quadratic kernel evaluation.
        PairFusionResult result;
        result.z = 1.0;
        result.log_z = 0.0;
        result.feasible = true;
        const Eigen::Index target =
            out_count == 0 ? p1.size() : static_cast<Eigen::Index>(out_count);
        result.density = p1.resample(target, rng);
        return result;
    }

    const Eigen::MatrixXd c1 = p1.centers_concat();
    const Eigen::MatrixXd c2 = p2.centers_concat();
    const Eigen::Index l1 = c1.cols();
    const Eigen::Index l2 = c2.cols();
    Eigen::MatrixXd support(p1.dim(), l1 + l2);
    support.leftCols(l1) = c1;
    support.rightCols(l2) = c2;

    const double log_l1 = std::log(static_cast<double>(l1));
    const double log_l2 = std::log(static_cast<double>(l2));
    std::vector<double> log_zeta(static_cast<std::size_t>(l1 + l2), kLogZero);
    for (Eigen::Index m = 0; m < support.cols(); ++m) {
        const double lp1 = p1.log_eval(support.col(m));
        const double lp2 = p2.log_eval(support.col(m));
        const double log_numer =
            detail::powered_log(lp1, w.w1) + detail::powered_log(lp2, w.w2);
        const double log_denom = log_sum_exp({log_l1 + lp1, log_l2 + lp2});
        if (log_numer > kLogZero && log_denom > kLogZero) {
            log_zeta[static_cast<std::size_t>(m)] = log_numer - log_denom;
        }
    }

    PairFusionResult result;
    result.log_z = log_sum_exp(log_zeta);
    result.z = result.log_z > kLogZero ? std::exp(result.log_z) : 0.0;
    if (!(result.z > 0.0) || !std::isfinite(result.log_z)) {
        result.z = 0.0;
        return result; // infeasible: Z underflows on (near-)disjoint supports
    }
    result.feasible = true;

    Eigen::VectorXd zeta(support.cols());
    for (Eigen::Index m = 0; m < support.cols(); ++m) {
        zeta(m) = std::exp(log_zeta[static_cast<std::size_t>(m)] - result.log_z);
    }
    const Eigen::Index target =
        out_count == 0 ? p1.size() : static_cast<Eigen::Index>(out_count);
    result.density =
        ParticleDensity::from_weighted(std::move(support), std::move(zeta))
            .resample(target, rng);
    return result;
}

// ---- GMB construction and moment matching ----

/// First-moment-matched MB reduction of a normalized GMB posterior:
/// r_l = sum_h w_h 1_{I1_h}(l) and p_l = sum_h w_h 1_{I1_h}(l) p_{h,l} / r_l.
/// The mixture is realized exactly by pooling the hypothesis particle sets;
/// no resampling happens here, so the first moment is preserved bit-for-bit
/// up to summation order.
[[nodiscard]] inline MBPosterior moment_match(const GMBPosterior& gmb) {
    MBPosterior mb;
    for (std::size_t l = 0; l < gmb.source_track_count(); ++l) {
        double r = 0.0;
        std::vector<std::pair<double, const ParticleDensity*>> components;
        for (const auto& h : gmb.hypotheses()) {
            if (h.weight <= 0.0 || !h.map.contains_source(l)) continue;
            const auto& srcs = h.map.sources();
            const auto pos = static_cast<std::size_t>(
                std::lower_bound(srcs.begin(), srcs.end(), l) - srcs.begin());
            r += h.weight;
            components.emplace_back(h.weight, &h.fused_densities[pos]);
        }
        if (r <= 0.0) continue;
        for (auto& c : components) c.first /= r;
        // Hypothesis weights can sum to exactly 1 for a track present in all
        // of them; cap below certainty so re-fusing this output keeps the
        // drop-the-track hypotheses representable (finite log(1 - r)).
        mb.add_track({std::min(r, kMaxExistence), ParticleDensity::mixture(components)});
    }
    return mb;
}

/// Pairwise GCI fusion of two MB posteriors (the smaller index space plays
/// L1; inputs and weights are swapped if needed).  Enumerates hypotheses
/// (I1, theta), weighs them as
///   w(I1, theta) ~ (Q1^{I1})^w1 (Q2^{theta(I1)})^w2 prod_l Z^{(l, theta(l))}
/// in the log domain, normalizes, prunes below `weight_floor`, and returns
/// both the GMB and its moment-matched MB on L1's index space.
[[nodiscard]] inline FusionOutput gci_mb_fuse(const MBPosterior& mb1, const MBPosterior& mb2,
                                              const FusionWeights& w, const FusionConfig& cfg,
                                              Rng& rng) {
    detail::check_fusion_weights(w);
    const bool swapped = mb1.track_count() > mb2.track_count();
    const MBPosterior& a = swapped ? mb2 : mb1;
    const MBPosterior& b = swapped ? mb1 : mb2;
    const FusionWeights wab = swapped ? FusionWeights{w.w2, w.w1} : w;
    const std::size_t m1 = a.track_count();
    const std::size_t m2 = b.track_count();

    // Pairwise fusion results, computed eagerly in index order so RNG
    // consumption (and thus the output) never depends on hypothesis order.
    const bool gated = std::max(m1, m2) > cfg.exhaustive_max_tracks;
    std::vector<std::vector<PairFusionResult>> pairs(m1);
    for (std::size_t l = 0; l < m1; ++l) {
        pairs[l].resize(m2);
        for (std::size_t j = 0; j < m2; ++j) {
            const ParticleDensity& pa = a.track(l).density;
            const ParticleDensity& pb = b.track(j).density;
            if (pa.empty() || pb.empty()) continue;
            if (gated) {
                const Eigen::VectorXd gap = (pa.mean() - pb.mean()).cwiseAbs();
                const Eigen::VectorXd allowance =
                    cfg.gate_bandwidths * (pa.kernel_std() + pb.kernel_std());
                if ((gap.array() > allowance.array()).any()) continue;
            }
            pairs[l][j] = fuse_track_pair(pa, pb, wab, rng, cfg.particles_out);
        }
    }

    // Hypothesis enumeration: subsets of L1 by ascending bitmask, then maps
    // in lexicographic target order — the canonical accumulation order.
    std::vector<GMBHypothesis> hypotheses;
    std::vector<double> log_weights;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m1); ++mask) {
        std::vector<std::size_t> sources;
        for (std::size_t l = 0; l < m1; ++l) {
            if ((mask >> l) & 1u) sources.push_back(l);
        }
        const double log_q1 = std::log(joint_existence_weight(a, sources));
        for (FusionMap& map : enumerate_fusion_maps(sources, m2)) {
            const double log_q2 = std::log(joint_existence_weight(b, map.targets()));
            double lw = detail::powered_log(log_q1, wab.w1) +
                        detail::powered_log(log_q2, wab.w2);
            bool feasible = true;
            std::vector<ParticleDensity> densities;
            std::vector<double> normalizers;
            densities.reserve(sources.size());
            normalizers.reserve(sources.size());
            for (std::size_t i = 0; i < sources.size() && feasible; ++i) {
                const PairFusionResult& pr = pairs[sources[i]][map.targets()[i]];
                if (!pr.feasible) {
                    feasible = false;
                    break;
                }
                lw += pr.log_z;
                densities.push_back(pr.density);
                normalizers.push_back(pr.z);
            }
            if (!feasible || !(lw > kLogZero)) continue;
            log_weights.push_back(lw);
            hypotheses.push_back(GMBHypothesis{std::move(map), lw, std::move(densities),
                                               std::move(normalizers)});
        }
    }

    if (hypotheses.empty()) {
        // Degenerate corner (certain tracks with only infeasible partners):
        // fall back to the empty hypothesis so the result stays well formed.
        hypotheses.push_back(GMBHypothesis{FusionMap{}, 1.0, {}, {}});
        log_weights.push_back(0.0);
    }

    // Max-shifted linear normalization: when several leading hypotheses have
    // bitwise-equal log weights (e.g. self-fusion), their normalized weights
    // come out exactly equal, so moment-matched r values cannot drift across
    // decision thresholds by an ulp.
    const double max_lw = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    for (std::size_t h = 0; h < hypotheses.size(); ++h) {
        hypotheses[h].weight = std::exp(log_weights[h] - max_lw);
        total += hypotheses[h].weight;
    }
    for (auto& h : hypotheses) h.weight /= total;
    std::erase_if(hypotheses,
                  [&](const GMBHypothesis& h) { return h.weight < cfg.weight_floor; });
    GMBPosterior gmb(std::move(hypotheses), m1);
    gmb.normalize();

    FusionOutput out;
    out.mb = moment_match(gmb);
    out.gmb = std::move(gmb);
    return out;
}

// ---- Multi-sensor plumbing ----

/// Pairwise Metropolis weight for fusing with a neighbor:
/// w2 = 1 / (1 + max(deg_node, deg_neighbor)), w1 = 1 - w2.
[[nodiscard]] inline FusionWeights metropolis_weights(std::size_t deg_node,
                                                      std::size_t deg_neighbor) {
    if (deg_node == 0 || deg_neighbor == 0) {
        throw std::domain_error("metropolis_weights: degrees must be positive");
    }
    const double w2 = 1.0 / (1.0 + static_cast<double>(std::max(deg_node, deg_neighbor)));
    return FusionWeights{1.0 - w2, w2};
}

/// Left fold of gci_mb_fuse over an ordered posterior sequence; step i uses
/// step_weights[i-1] for (accumulated, posteriors[i]).
[[nodiscard]] inline MBPosterior sequential_fuse(const std::vector<MBPosterior>& posteriors,
                                                 const std::vector<FusionWeights>& step_weights,
                                                 const FusionConfig& cfg, Rng& rng) {
    if (posteriors.empty()) {
        throw std::domain_error("sequential_fuse: need at least one posterior");
    }
    if (step_weights.size() + 1 != posteriors.size()) {
        throw std::invalid_argument("sequential_fuse: need one weight pair per fold");
    }
    MBPosterior fused = posteriors.front();
    for (std::size_t i = 1; i < posteriors.size(); ++i) {
        fused = gci_mb_fuse(fused, posteriors[i], step_weights[i - 1], cfg, rng).mb;
    }
    return fused;
}

} // namespace gcimb
