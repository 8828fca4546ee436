#include "gcimb/gci_fusion.hpp"
#include "gcimb/mb_tbd_filter.hpp"
#include "gcimb/metrics.hpp"
#include "gcimb/particle_density.hpp"
#include "gcimb/rng.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace {

using gcimb::BernoulliTrack;
using gcimb::FusionConfig;
using gcimb::FusionMap;
using gcimb::FusionOutput;
using gcimb::FusionWeights;
using gcimb::GMBHypothesis;
using gcimb::GMBPosterior;
using gcimb::MBPosterior;
using gcimb::PairFusionResult;
using gcimb::ParticleDensity;

Eigen::VectorXd v1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

ParticleDensity gaussian_cloud(double mean, double std, int count, std::uint64_t seed) {
    gcimb::Rng rng = gcimb::make_rng(seed, {});
    std::normal_distribution<double> draw(mean, std);
    Eigen::MatrixXd centers(1, count);
    for (int i = 0; i < count; ++i) centers(0, i) = draw(rng);
    return ParticleDensity::from_centers(centers);
}

std::size_t factorial_ratio(std::size_t m, std::size_t n) {
    std::size_t a = 1;
    for (std::size_t i = 0; i < n; ++i) a *= m - i;
    return a;
}

// ---- enumerate_fusion_maps ----

TEST(EnumerateFusionMaps, EmptySubsetYieldsOneEmptyMap) {
    const auto maps = gcimb::enumerate_fusion_maps({}, 3);
    ASSERT_EQ(maps.size(), 1u);
    EXPECT_TRUE(maps[0].empty());
}

TEST(EnumerateFusionMaps, SingleSourceThreeTargets) {
    const auto maps = gcimb::enumerate_fusion_maps({0}, 3);
    ASSERT_EQ(maps.size(), 3u);
    EXPECT_EQ(maps[0].target_of(0), 0u);
    EXPECT_EQ(maps[1].target_of(0), 1u);
    EXPECT_EQ(maps[2].target_of(0), 2u);
}

TEST(EnumerateFusionMaps, SixMapsForTwoByTwo) {
    // All nonempty subsets of a two-track space mapped into a two-track space.
    std::size_t total = 0;
    total += gcimb::enumerate_fusion_maps({0}, 2).size();
    total += gcimb::enumerate_fusion_maps({1}, 2).size();
    total += gcimb::enumerate_fusion_maps({0, 1}, 2).size();
    EXPECT_EQ(total, 6u);
}

TEST(EnumerateFusionMaps, OversizedSubsetYieldsNothing) {
    EXPECT_TRUE(gcimb::enumerate_fusion_maps({0, 1, 2}, 2).empty());
}

TEST(EnumerateFusionMaps, CountsMatchFallingFactorial) {
    for (std::size_t m = 0; m <= 5; ++m) {
        for (std::size_t n = 0; n <= m; ++n) {
            std::vector<std::size_t> sources;
            for (std::size_t i = 0; i < n; ++i) sources.push_back(i);
            const auto maps = gcimb::enumerate_fusion_maps(sources, m);
            EXPECT_EQ(maps.size(), factorial_ratio(m, n)) << "m=" << m << " n=" << n;
            std::set<std::vector<std::size_t>> seen;
            for (const auto& map : maps) seen.insert(map.targets());
            EXPECT_EQ(seen.size(), maps.size()) << "duplicate maps";
        }
    }
}

// ---- fuse_track_pair ----

TEST(FuseTrackPair, SelfFusionIsIdentity) {
    const ParticleDensity p = gaussian_cloud(0.0, 1.0, 10000, 71);
    gcimb::Rng rng = gcimb::make_rng(72, {});
    const PairFusionResult out = gcimb::fuse_track_pair(p, p, {0.5, 0.5}, rng);
    ASSERT_TRUE(out.feasible);
    EXPECT_NEAR(out.z, 1.0, 0.05);
    EXPECT_NEAR(out.density.mean()(0), 0.0, 0.05);
    EXPECT_EQ(out.density.size(), p.size());
}

TEST(FuseTrackPair, SameDistributionDifferentSamples) {
    // Unlike SelfFusionIsIdentity this goes through the full importance
    // sampling path: two independent clouds from the same N(0,1).
    const ParticleDensity p1 = gaussian_cloud(0.0, 1.0, 10000, 301);
    const ParticleDensity p2 = gaussian_cloud(0.0, 1.0, 10000, 302);
    gcimb::Rng rng = gcimb::make_rng(303, {});
    const PairFusionResult out = gcimb::fuse_track_pair(p1, p2, {0.5, 0.5}, rng);
    ASSERT_TRUE(out.feasible);
    EXPECT_NEAR(out.z, 1.0, 0.05);
    EXPECT_NEAR(out.density.mean()(0), 0.0, 0.05);
}

TEST(FuseTrackPair, GaussianExponentialMixtureOracle) {
    // p1 ~ N(0,1), p2 ~ N(2,1), w = (1/2, 1/2): the fused density is N(1, 1)
    // and Z = exp(-(m1-m2)^2 / 8) = exp(-1/2).
    const ParticleDensity p1 = gaussian_cloud(0.0, 1.0, 10000, 73);
    const ParticleDensity p2 = gaussian_cloud(2.0, 1.0, 10000, 74);
    gcimb::Rng rng = gcimb::make_rng(75, {});
    const PairFusionResult out = gcimb::fuse_track_pair(p1, p2, {0.5, 0.5}, rng);
    ASSERT_TRUE(out.feasible);
    EXPECT_NEAR(out.z, std::exp(-0.5), 0.1 * std::exp(-0.5));
    EXPECT_NEAR(out.density.mean()(0), 1.0, 0.1);
    const Eigen::MatrixXd c = out.density.centers_concat();
    const double mean = c.row(0).mean();
    const double var =
        (c.row(0).array() - mean).square().sum() / static_cast<double>(c.cols() - 1);
    EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(FuseTrackPair, DisjointSupportsAreInfeasible) {
    const ParticleDensity p1 = gaussian_cloud(0.0, 1.0, 200, 76);
    const ParticleDensity p2 = gaussian_cloud(1e6, 1.0, 200, 77);
    gcimb::Rng rng = gcimb::make_rng(78, {});
    const PairFusionResult out = gcimb::fuse_track_pair(p1, p2, {0.5, 0.5}, rng);
    EXPECT_FALSE(out.feasible);
    EXPECT_DOUBLE_EQ(out.z, 0.0);
    EXPECT_TRUE(out.density.empty());
}

TEST(FuseTrackPair, DegenerateWeightRecoversFirstInput) {
    const ParticleDensity p1 = gaussian_cloud(3.0, 1.0, 5000, 79);
    const ParticleDensity p2 = gaussian_cloud(5.0, 1.0, 5000, 80);
    gcimb::Rng rng = gcimb::make_rng(81, {});
    const PairFusionResult out = gcimb::fuse_track_pair(p1, p2, {1.0, 0.0}, rng);
    ASSERT_TRUE(out.feasible);
    EXPECT_NEAR(out.z, 1.0, 0.05);
    EXPECT_NEAR(out.density.mean()(0), 3.0, 0.1);
}

TEST(FuseTrackPair, HonorsOutputCount) {
    const ParticleDensity p1 = gaussian_cloud(0.0, 1.0, 300, 82);
    const ParticleDensity p2 = gaussian_cloud(0.5, 1.0, 400, 83);
    gcimb::Rng rng = gcimb::make_rng(84, {});
    EXPECT_EQ(gcimb::fuse_track_pair(p1, p2, {0.5, 0.5}, rng, 123).density.size(), 123);
    EXPECT_EQ(gcimb::fuse_track_pair(p1, p2, {0.5, 0.5}, rng).density.size(), 300);
}

TEST(FuseTrackPair, RejectsBadInput) {
    const ParticleDensity p = gaussian_cloud(0.0, 1.0, 100, 85);
    const ParticleDensity empty;
    gcimb::Rng rng = gcimb::make_rng(86, {});
    EXPECT_THROW(gcimb::fuse_track_pair(p, empty, {0.5, 0.5}, rng), std::domain_error);
    EXPECT_THROW(gcimb::fuse_track_pair(p, p, {0.7, 0.7}, rng), std::invalid_argument);
    EXPECT_THROW(gcimb::fuse_track_pair(p, p, {-0.2, 1.2}, rng), std::invalid_argument);
}

// ---- moment_match ----

TEST(MomentMatch, SingleHypothesisPassesThrough) {
    const ParticleDensity p = gaussian_cloud(2.0, 1.0, 200, 91);
    GMBPosterior gmb({GMBHypothesis{FusionMap({0}, {0}), 1.0, {p}, {1.0}}}, 1);
    const MBPosterior mb = gcimb::moment_match(gmb);
    ASSERT_EQ(mb.track_count(), 1u);
    // A track present in every hypothesis carries the full mass, reported
    // capped below certainty so the output stays fusable (finite log(1 - r)).
    EXPECT_DOUBLE_EQ(mb.track(0).r, gcimb::kMaxExistence);
    EXPECT_DOUBLE_EQ(mb.track(0).density.mean()(0), p.mean()(0));
}

TEST(MomentMatch, ExistenceIsHypothesisMass) {
    const ParticleDensity p = gaussian_cloud(0.0, 1.0, 100, 92);
    GMBPosterior gmb({GMBHypothesis{FusionMap({0}, {0}), 0.6, {p}, {1.0}},
                      GMBHypothesis{FusionMap({}, {}), 0.4, {}, {}}},
                     1);
    const MBPosterior mb = gcimb::moment_match(gmb);
    ASSERT_EQ(mb.track_count(), 1u);
    EXPECT_DOUBLE_EQ(mb.track(0).r, 0.6);
}

TEST(MomentMatch, PreservesFirstMomentExactly) {
    // A hand-built (never resampled) GMB over two source tracks, with
    // different per-hypothesis densities: the MB reduction's PHD must match
    // the GMB's PHD pointwise.
    const ParticleDensity a1 = gaussian_cloud(0.0, 0.5, 150, 93);
    const ParticleDensity a2 = gaussian_cloud(0.2, 0.6, 120, 94);
    const ParticleDensity b1 = gaussian_cloud(6.0, 0.4, 130, 95);
    GMBPosterior gmb({GMBHypothesis{FusionMap({0}, {1}), 0.30, {a1}, {1.0}},
                      GMBHypothesis{FusionMap({0, 1}, {0, 1}), 0.45, {a2, b1}, {1.0, 1.0}},
                      GMBHypothesis{FusionMap({1}, {0}), 0.25, {b1}, {1.0}}},
                     2);
    const MBPosterior mb = gcimb::moment_match(gmb);
    ASSERT_EQ(mb.track_count(), 2u);
    EXPECT_NEAR(mb.track(0).r, 0.75, 1e-12);
    EXPECT_NEAR(mb.track(1).r, 0.70, 1e-12);
    for (double x : {-1.0, 0.0, 0.3, 1.0, 5.5, 6.0, 6.5, 9.0}) {
        EXPECT_NEAR(gcimb::phd_mb(mb, v1(x)), gcimb::phd_gmb(gmb, v1(x)), 1e-10);
    }
}

// ---- gci_mb_fuse ----

MBPosterior two_track_posterior(double r0, double r1, std::uint64_t seed_base) {
    MBPosterior mb;
    mb.add_track({r0, gaussian_cloud(0.0, 0.5, 400, seed_base)});
    mb.add_track({r1, gaussian_cloud(10.0, 0.5, 400, seed_base + 1)});
    return mb;
}

TEST(GciMbFuse, SelfFusionPreservesTracks) {
    const MBPosterior mb = two_track_posterior(0.6, 0.7, 101);
    gcimb::Rng rng = gcimb::make_rng(103, {});
    const FusionOutput out = gcimb::gci_mb_fuse(mb, mb, {0.5, 0.5}, {}, rng);

    EXPECT_NEAR(out.gmb.weight_sum(), 1.0, 1e-9);
    // Surviving hypotheses: empty, {0}->0, {1}->1, {0,1}->(0,1); the
    // cross-track maps are killed by their vanishing normalizers.
    EXPECT_EQ(out.gmb.hypotheses().size(), 4u);

    ASSERT_EQ(out.mb.track_count(), 2u);
    EXPECT_NEAR(out.mb.track(0).r, 0.6, 0.02);
    EXPECT_NEAR(out.mb.track(1).r, 0.7, 0.02);
    const double bw = mb.track(0).density.kernel_std()(0);
    EXPECT_NEAR(out.mb.track(0).density.mean()(0), 0.0, bw);
    EXPECT_NEAR(out.mb.track(1).density.mean()(0), 10.0, bw);
}

TEST(GciMbFuse, TwoHypothesisHandEnumeration) {
    // M1 = M2 = 1 with the same cloud: weights {empty: 1-r, {0}->0: r Z}/C
    // with Z = 1 exactly (identical kernel fits), so r stays put.
    for (double r : {0.2, 0.5, 0.9}) {
        MBPosterior mb;
        mb.add_track({r, gaussian_cloud(0.0, 1.0, 500, 105)});
        gcimb::Rng rng = gcimb::make_rng(106, {});
        const FusionOutput out = gcimb::gci_mb_fuse(mb, mb, {0.5, 0.5}, {}, rng);
        ASSERT_EQ(out.gmb.hypotheses().size(), 2u);
        ASSERT_EQ(out.mb.track_count(), 1u);
        EXPECT_NEAR(out.mb.track(0).r, r, 1e-9);
    }
}

TEST(GciMbFuse, EmptyPosteriorDominates) {
    MBPosterior empty;
    const MBPosterior mb = two_track_posterior(0.6, 0.7, 107);
    gcimb::Rng rng = gcimb::make_rng(109, {});
    const FusionOutput out = gcimb::gci_mb_fuse(empty, mb, {0.5, 0.5}, {}, rng);
    EXPECT_TRUE(out.mb.empty());
    ASSERT_EQ(out.gmb.hypotheses().size(), 1u);
    EXPECT_TRUE(out.gmb.hypotheses()[0].map.empty());
    EXPECT_DOUBLE_EQ(out.gmb.hypotheses()[0].weight, 1.0);

    const FusionOutput both = gcimb::gci_mb_fuse(empty, empty, {0.5, 0.5}, {}, rng);
    EXPECT_TRUE(both.mb.empty());
}

TEST(GciMbFuse, ResultLivesOnSmallerIndexSpace) {
    MBPosterior big = two_track_posterior(0.6, 0.7, 110);
    MBPosterior small;
    small.add_track({0.8, gaussian_cloud(0.1, 0.5, 400, 112)});
    gcimb::Rng rng = gcimb::make_rng(113, {});
    const FusionOutput out = gcimb::gci_mb_fuse(big, small, {0.5, 0.5}, {}, rng);
    EXPECT_EQ(out.gmb.source_track_count(), 1u);
    ASSERT_EQ(out.mb.track_count(), 1u);
    EXPECT_NEAR(out.mb.track(0).density.mean()(0), 0.05, 0.2);
}

TEST(GciMbFuse, ArgmaxStability) {
    // Fusing a posterior with itself must not move any track across the
    // extraction threshold.
    for (double r : {0.2, 0.5, 0.9}) {
        const MBPosterior mb = two_track_posterior(r, r, 114);
        gcimb::Rng rng = gcimb::make_rng(116, {});
        const FusionOutput out = gcimb::gci_mb_fuse(mb, mb, {0.5, 0.5}, {}, rng);
        const gcimb::FilterConfig cfg;
        EXPECT_EQ(gcimb::extract_estimates(out.mb, cfg).size(),
                  gcimb::extract_estimates(mb, cfg).size())
            << "r=" << r;
    }
}

TEST(GciMbFuse, DeterministicForFixedSeed) {
    const MBPosterior mb1 = two_track_posterior(0.6, 0.7, 117);
    const MBPosterior mb2 = two_track_posterior(0.5, 0.8, 119);
    gcimb::Rng rng_a = gcimb::make_rng(121, {});
    gcimb::Rng rng_b = gcimb::make_rng(121, {});
    const FusionOutput a = gcimb::gci_mb_fuse(mb1, mb2, {0.5, 0.5}, {}, rng_a);
    const FusionOutput b = gcimb::gci_mb_fuse(mb1, mb2, {0.5, 0.5}, {}, rng_b);
    ASSERT_EQ(a.mb.track_count(), b.mb.track_count());
    for (std::size_t l = 0; l < a.mb.track_count(); ++l) {
        EXPECT_EQ(a.mb.track(l).r, b.mb.track(l).r);
        EXPECT_EQ(a.mb.track(l).density.mean()(0), b.mb.track(l).density.mean()(0));
    }
}

TEST(GciMbFuse, RefusedOutputDropsOnlyTheDivergedTrack) {
    // Distills the M2 feedback loop: a previous fusion's moment-matched
    // output (every track at the existence ceiling) is fused again with a
    // posterior whose first track wandered off. The right outcome drops that
    // one track and keeps the aligned pair. With saturated existence (r = 1
    // exactly) every partial subset would weigh log(1 - r) = -inf and the
    // fusion could only answer "empty".
    MBPosterior certain;
    certain.add_track({gcimb::kMaxExistence, gaussian_cloud(0.0, 0.05, 300, 50)});
    certain.add_track({gcimb::kMaxExistence, gaussian_cloud(8.0, 0.05, 300, 51)});
    certain.add_track({gcimb::kMaxExistence, gaussian_cloud(16.0, 0.05, 300, 52)});

    MBPosterior neighbor;
    neighbor.add_track({0.999, gaussian_cloud(1.0, 0.05, 300, 53)});
    neighbor.add_track({0.999, gaussian_cloud(8.0, 0.05, 300, 54)});
    neighbor.add_track({0.999, gaussian_cloud(16.0, 0.05, 300, 55)});

    gcimb::Rng rng = gcimb::make_rng(7, {});
    const FusionOutput out = gcimb::gci_mb_fuse(certain, neighbor, {0.5, 0.5}, {}, rng);
    ASSERT_EQ(out.mb.track_count(), 2u);
    EXPECT_GT(out.mb.track(0).r, 0.9);
    EXPECT_GT(out.mb.track(1).r, 0.9);
    EXPECT_LE(out.mb.track(0).r, gcimb::kMaxExistence);
    EXPECT_LE(out.mb.track(1).r, gcimb::kMaxExistence);
    const double bw = certain.track(1).density.kernel_std()(0);
    EXPECT_NEAR(out.mb.track(0).density.mean()(0), 8.0, 3.0 * bw);
    EXPECT_NEAR(out.mb.track(1).density.mean()(0), 16.0, 3.0 * bw);
}

TEST(GciMbFuse, GatedCertainTrackFallsBackToEmpty) {
    // One certain track vs seven far-away tracks: gating kills every pair,
    // Q1 of the empty subset is zero, and the fallback keeps things sane.
    MBPosterior a;
    a.add_track({1.0, gaussian_cloud(0.0, 0.5, 100, 122)});
    MBPosterior b;
    for (int j = 0; j < 7; ++j) {
        b.add_track({0.5, gaussian_cloud(1e6 + 100.0 * j, 0.5, 100, 123 + j)});
    }
    gcimb::Rng rng = gcimb::make_rng(131, {});
    const FusionOutput out = gcimb::gci_mb_fuse(a, b, {0.5, 0.5}, {}, rng);
    EXPECT_TRUE(out.mb.empty());
    EXPECT_NEAR(out.gmb.weight_sum(), 1.0, 1e-9);
}

// ---- metropolis_weights ----

TEST(MetropolisWeights, FormulaAndSymmetry) {
    EXPECT_DOUBLE_EQ(gcimb::metropolis_weights(1, 1).w2, 0.5);
    EXPECT_DOUBLE_EQ(gcimb::metropolis_weights(1, 1).w1, 0.5);
    EXPECT_DOUBLE_EQ(gcimb::metropolis_weights(2, 1).w2, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(gcimb::metropolis_weights(2, 1).w1, 2.0 / 3.0);
    for (std::size_t da = 1; da <= 4; ++da) {
        for (std::size_t db = 1; db <= 4; ++db) {
            EXPECT_DOUBLE_EQ(gcimb::metropolis_weights(da, db).w2,
                             gcimb::metropolis_weights(db, da).w2);
            EXPECT_DOUBLE_EQ(gcimb::metropolis_weights(da, db).w1 +
                                 gcimb::metropolis_weights(da, db).w2,
                             1.0);
        }
    }
    EXPECT_THROW((void)gcimb::metropolis_weights(0, 1), std::domain_error);
}

// ---- sequential_fuse ----

TEST(SequentialFuse, SinglePosteriorIsUnchanged) {
    const MBPosterior mb = two_track_posterior(0.6, 0.7, 132);
    gcimb::Rng rng = gcimb::make_rng(134, {});
    const MBPosterior out = gcimb::sequential_fuse({mb}, {}, {}, rng);
    ASSERT_EQ(out.track_count(), 2u);
    EXPECT_DOUBLE_EQ(out.track(0).r, 0.6);
    EXPECT_DOUBLE_EQ(out.track(1).r, 0.7);
}

TEST(SequentialFuse, TwoElementsEqualOneFuseCall) {
    const MBPosterior mb1 = two_track_posterior(0.6, 0.7, 135);
    const MBPosterior mb2 = two_track_posterior(0.5, 0.8, 137);
    gcimb::Rng rng_a = gcimb::make_rng(139, {});
    gcimb::Rng rng_b = gcimb::make_rng(139, {});
    const MBPosterior seq = gcimb::sequential_fuse({mb1, mb2}, {{0.5, 0.5}}, {}, rng_a);
    const MBPosterior direct = gcimb::gci_mb_fuse(mb1, mb2, {0.5, 0.5}, {}, rng_b).mb;
    ASSERT_EQ(seq.track_count(), direct.track_count());
    for (std::size_t l = 0; l < seq.track_count(); ++l) {
        EXPECT_EQ(seq.track(l).r, direct.track(l).r);
    }
}

TEST(SequentialFuse, ThreeIdenticalPosteriorsPreserveTracks) {
    const MBPosterior mb = two_track_posterior(0.6, 0.9, 140);
    gcimb::Rng rng = gcimb::make_rng(142, {});
    // Equal per-source contributions: (1/2,1/2) then (2/3,1/3).
    const MBPosterior out = gcimb::sequential_fuse(
        {mb, mb, mb}, {{0.5, 0.5}, {2.0 / 3.0, 1.0 / 3.0}}, {}, rng);
    ASSERT_EQ(out.track_count(), 2u);
    EXPECT_NEAR(out.track(0).r, 0.6, 0.03);
    EXPECT_NEAR(out.track(1).r, 0.9, 0.03);
    const double bw = mb.track(0).density.kernel_std()(0);
    EXPECT_NEAR(out.track(0).density.mean()(0), 0.0, bw);
    EXPECT_NEAR(out.track(1).density.mean()(0), 10.0, bw);
}

TEST(SequentialFuse, OrderInsensitivity) {
    // Three single-track views of the same target from different sample sets.
    std::vector<MBPosterior> posts;
    for (int s = 0; s < 3; ++s) {
        MBPosterior mb;
        mb.add_track(
            {0.8, gaussian_cloud(5.0 + 0.05 * s, 1.0, 600, 143 + static_cast<unsigned>(s))});
        posts.push_back(std::move(mb));
    }
    const std::vector<FusionWeights> weights{{0.5, 0.5}, {2.0 / 3.0, 1.0 / 3.0}};
    gcimb::Rng rng_a = gcimb::make_rng(150, {});
    gcimb::Rng rng_b = gcimb::make_rng(151, {});
    const MBPosterior fwd = gcimb::sequential_fuse(posts, weights, {}, rng_a);
    const MBPosterior rev =
        gcimb::sequential_fuse({posts[2], posts[1], posts[0]}, weights, {}, rng_b);
    ASSERT_EQ(fwd.track_count(), 1u);
    ASSERT_EQ(rev.track_count(), 1u);
    EXPECT_NEAR(fwd.track(0).r, rev.track(0).r, 0.05);
    const double bw = posts[0].track(0).density.kernel_std()(0);
    EXPECT_NEAR(fwd.track(0).density.mean()(0), rev.track(0).density.mean()(0), 2.0 * bw);
}

TEST(SequentialFuse, RejectsBadInput) {
    gcimb::Rng rng = gcimb::make_rng(160, {});
    EXPECT_THROW(gcimb::sequential_fuse({}, {}, {}, rng), std::domain_error);
    const MBPosterior mb = two_track_posterior(0.5, 0.5, 161);
    EXPECT_THROW(gcimb::sequential_fuse({mb, mb}, {}, {}, rng), std::invalid_argument);
}

} // namespace
