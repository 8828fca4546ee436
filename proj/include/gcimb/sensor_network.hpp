#pragma once

// Distributed tracking scenarios: a connected sensor network in which every
// node runs its own MB track-before-detect filter on independently noisy
// frames of a shared ground truth, exchanges posteriors with its neighbors
// once per scan, and folds them together through pairwise GCI fusion.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gci_fusion.hpp"
#include "image_model.hpp"
#include "mb_tbd_filter.hpp"
#include "metrics.hpp"

namespace gcimb {

// ---- Network topology ----

/// Undirected, connected sensor graph over nodes 0..node_count-1.
/// Self-loops and disconnected graphs are rejected at construction.
class NetworkTopology {
public:
    /// Single isolated node.
    NetworkTopology() : adjacency_(1) {}

    NetworkTopology(int node_count, const std::vector<std::pair<int, int>>& edges) {
        if (node_count < 1) {
            throw std::invalid_argument("NetworkTopology: need at least one node");
        }
        adjacency_.resize(static_cast<std::size_t>(node_count));
        for (const auto& [a, b] : edges) {
            if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
                throw std::invalid_argument("NetworkTopology: edge endpoint out of range");
            }
            if (a == b) {
                throw std::invalid_argument("NetworkTopology: self-loops not allowed");
            }
            adjacency_[static_cast<std::size_t>(a)].push_back(b);
            adjacency_[static_cast<std::size_t>(b)].push_back(a);
        }
        for (auto& nbrs : adjacency_) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        }
        if (!connected()) {
            throw std::invalid_argument("NetworkTopology: graph must be connected");
        }
    }

    /// Path graph 0 - 1 - ... - (n-1).
    [[nodiscard]] static NetworkTopology chain(int node_count) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i + 1 < node_count; ++i) edges.emplace_back(i, i + 1);
        return NetworkTopology(node_count, edges);
    }

    [[nodiscard]] int node_count() const { return static_cast<int>(adjacency_.size()); }

    /// Neighbor ids in ascending order.
    [[nodiscard]] const std::vector<int>& neighbors(int node) const {
        return adjacency_.at(static_cast<std::size_t>(node));
    }

    [[nodiscard]] int degree(int node) const {
        return static_cast<int>(neighbors(node).size());
    }

    [[nodiscard]] bool is_adjacent(int a, int b) const {
        const auto& nbrs = neighbors(a);
        return std::binary_search(nbrs.begin(), nbrs.end(), b);
    }

private:
    [[nodiscard]] bool connected() const {
        std::vector<char> seen(adjacency_.size(), 0);
        std::queue<int> frontier;
        frontier.push(0);
        seen[0] = 1;
        while (!frontier.empty()) {
            const int at = frontier.front();
            frontier.pop();
            for (int nb : adjacency_[static_cast<std::size_t>(at)]) {
                if (!seen[static_cast<std::size_t>(nb)]) {
                    seen[static_cast<std::size_t>(nb)] = 1;
                    frontier.push(nb);
                }
            }
        }
        return std::find(seen.begin(), seen.end(), 0) == seen.end();
    }

    std::vector<std::vector<int>> adjacency_;
};

/// Metropolis pair weights looked up from the topology; `neighbor` must be
/// adjacent to `node`.
[[nodiscard]] inline FusionWeights metropolis_weights(const NetworkTopology& topology,
                                                      int node, int neighbor) {
    if (!topology.is_adjacent(node, neighbor)) {
        throw std::domain_error("metropolis_weights: nodes are not adjacent");
    }
    return metropolis_weights(static_cast<std::size_t>(topology.degree(node)),
                              static_cast<std::size_t>(topology.degree(neighbor)));
}

// ---- Scenario configuration ----

/// M1: every node keeps filtering on its own local posterior and the fused
/// posterior is report-only. M2: the fused posterior is fed back as the
/// node's working posterior for the next scan.
enum class WorkMode { M1, M2 };

[[nodiscard]] inline std::string to_string(WorkMode mode) {
    return mode == WorkMode::M1 ? "M1" : "M2";
}

struct ScenarioConfig {
    SensorModel sensor;
    MotionModel motion;
    FilterConfig filter;
    FusionConfig fusion;
    OspaParams ospa_params;
    NetworkTopology topology;  // default: one isolated node
    GroundTruth truth;
    WorkMode mode = WorkMode::M1;
    int steps = 30;
    /// OSPA level below which an estimate counts as efficient
    /// (see efficiency_proportion); default is half the OSPA cutoff.
    double efficiency_threshold = 2.5;
    /// M2 feedback only: a local track whose position mean is farther than
    /// this from every fused track survives the feedback swap (see
    /// feedback_posterior). Zero disables retention and feeds back the
    /// fused posterior alone.
    double feedback_retention_distance = 4.0;
    /// Diagnostic switch: when set, every node observes the identical frame
    /// realization instead of independent sensor noise (symmetry checks).
    bool shared_frames = false;
};

/// Throws invalid_argument naming the offending field. run_scenario calls
/// this before any simulation work.
inline void validate(const ScenarioConfig& config) {
    if (config.steps < 1) {
        throw std::invalid_argument("ScenarioConfig: steps must be >= 1");
    }
    if (config.truth.targets.empty()) {
        throw std::invalid_argument("ScenarioConfig: truth needs at least one target");
    }
    for (const auto& target : config.truth.targets) {
        if (target.states.empty()) {
            throw std::invalid_argument("ScenarioConfig: target without states");
        }
        for (const auto& x : target.states) {
            if (x.size() != 4) {
                throw std::invalid_argument("ScenarioConfig: target states must be 4-D");
            }
        }
    }
    if (!(config.efficiency_threshold > 0.0)) {
        throw std::invalid_argument("ScenarioConfig: efficiency_threshold must be positive");
    }
    if (config.feedback_retention_distance < 0.0) {
        throw std::invalid_argument(
            "ScenarioConfig: feedback_retention_distance must be >= 0");
    }
    if (!(config.sensor.noise_power > 0.0)) {
        throw std::invalid_argument("ScenarioConfig: sensor noise_power must be positive");
    }
}

/// One (scan, node) log line of a scenario run.
struct StepRecord {
    int step = 0;  // scan index k, 1-based
    int node = 0;  // sensor id, 0-based
    double local_ospa = 0.0;
    double fused_ospa = 0.0;
    int card_local = 0;
    int card_fused = 0;
    /// Set-density approximation error of the node's local posterior at the
    /// exponent of its first pairwise fusion (exactly 0 for isolated nodes,
    /// where that exponent is 1).
    double approx_error = 0.0;
    std::vector<State> local_estimates;
    std::vector<State> fused_estimates;
};

namespace detail {

inline constexpr std::uint64_t kSaltBirth = 1;
inline constexpr std::uint64_t kSaltFrame = 2;
inline constexpr std::uint64_t kSaltFilter = 3;
inline constexpr std::uint64_t kSaltFusion = 4;

[[nodiscard]] inline std::vector<Eigen::VectorXd> positions(const std::vector<State>& states) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(states.size());
    for (const auto& x : states) out.push_back(x.head(2));
    return out;
}

/// Weight pair of each left fold of sequential_fuse at `node`: per-neighbor
/// Metropolis shares 1 / (1 + max degree), the node itself keeping the
/// remainder. On a 3-chain the middle node folds (1/2, 1/2) then (2/3, 1/3),
/// giving all three posteriors equal final shares.
[[nodiscard]] inline std::vector<FusionWeights> fold_weights(const NetworkTopology& topology,
                                                             int node) {
    std::vector<double> shares;
    shares.reserve(topology.neighbors(node).size());
    double own = 1.0;
    for (int nb : topology.neighbors(node)) {
        const double share = metropolis_weights(topology, node, nb).w2;
        shares.push_back(share);
        own -= share;
    }
    std::vector<FusionWeights> folds;
    folds.reserve(shares.size());
    double carried = own;
    for (double share : shares) {
        const double total = carried + share;
        folds.push_back({carried / total, share / total});
        carried = total;
    }
    return folds;
}

}  // namespace detail

/// Posterior a node adopts after M2 feedback: the fused tracks plus every
/// local track whose position mean lies farther than `retention_distance`
/// from all fused tracks. Fusion keeps only tracks both inputs support, so
/// a track that fell out of the fused posterior has no counterpart there;
/// with no birth process, overwriting the node's copy would erase that
/// target from the node for good. Retained tracks keep refining against the
/// node's own frames and rejoin the fused set once the neighbors agree
/// again. `retention_distance <= 0` returns the fused posterior unchanged.
[[nodiscard]] inline MBPosterior feedback_posterior(const MBPosterior& local,
                                                    const MBPosterior& fused,
                                                    double retention_distance) {
    MBPosterior out = fused;
    if (retention_distance <= 0.0) return out;
    for (const auto& t : local.tracks()) {
        if (t.density.empty()) continue;
        const State mean = t.density.mean();
        bool represented = false;
        for (const auto& f : fused.tracks()) {
            if (f.density.empty()) continue;
            const State fused_mean = f.density.mean();
            if ((mean.head(2) - fused_mean.head(2)).norm() <= retention_distance) {
                represented = true;
                break;
            }
        }
        if (!represented) out.add_track(t);
    }
    return out;
}

// ---- Scenario driver ----

/// Run one full scenario: per scan every node filters its own frame, the
/// post-update posteriors travel along the edges, and every node sequentially
/// fuses its closed neighborhood (own posterior first, then neighbors in
/// ascending id order) with Metropolis weights. Returns one record per
/// (scan, node). All randomness derives from (seed, run_index), so the same
/// pair always reproduces the identical record series.
[[nodiscard]] inline std::vector<StepRecord> run_scenario(const ScenarioConfig& config,
                                                          std::uint64_t seed,
                                                          std::uint64_t run_index = 0) {
    validate(config);
    const int nodes = config.topology.node_count();
    std::vector<MBPosterior> working(static_cast<std::size_t>(nodes));
    std::vector<StepRecord> records;
    records.reserve(static_cast<std::size_t>(config.steps * nodes));

    for (int k = 1; k <= config.steps; ++k) {
        const auto uk = static_cast<std::uint64_t>(k);
        const std::vector<State> truth = config.truth.states_at(k);
        const std::vector<Eigen::VectorXd> truth_xy = detail::positions(truth);

        // New targets enter every node's filter as fresh tracks around their
        // true starting state (the measurement model has no birth component).
        std::vector<State> born;
        for (const auto& target : config.truth.targets) {
            if (target.birth == k) born.push_back(target.states.front());
        }

        std::vector<MBPosterior> locals(static_cast<std::size_t>(nodes));
        std::vector<std::vector<State>> local_estimates(static_cast<std::size_t>(nodes));
        for (int n = 0; n < nodes; ++n) {
            const auto un = static_cast<std::uint64_t>(n);
            if (!born.empty()) {
                Rng birth_rng = make_rng(seed, {run_index, detail::kSaltBirth, uk, un});
                MBPosterior fresh = initialize_tracks(born, config.filter, birth_rng);
                for (auto& t : fresh.tracks()) {
                    working[static_cast<std::size_t>(n)].add_track(std::move(t));
                }
            }
            Rng filter_rng = make_rng(seed, {run_index, detail::kSaltFilter, uk, un});
            Rng frame_rng = config.shared_frames
                                ? make_rng(seed, {run_index, detail::kSaltFrame, uk})
                                : make_rng(seed, {run_index, detail::kSaltFrame, uk, un});
            const ImageFrame frame = generate_frame(truth, config.sensor, frame_rng, k);
            MBPosterior mb = predict(working[static_cast<std::size_t>(n)], config.motion,
                                     filter_rng);
            mb = update(mb, frame, config.sensor);
            mb = resample_tracks(mb, config.filter.particles_per_track, filter_rng);
            mb = regularize_tracks(mb, filter_rng);
            mb = merge_and_prune(mb, config.filter);
            local_estimates[static_cast<std::size_t>(n)] =
                extract_estimates(mb, config.filter);
            locals[static_cast<std::size_t>(n)] = std::move(mb);
        }

        // Exchange and fuse. `locals` holds the immutable snapshots every
        // node reads, so fusion at one node never sees another's feedback.
        for (int n = 0; n < nodes; ++n) {
            const auto un = static_cast<std::uint64_t>(n);
            const std::vector<int>& nbrs = config.topology.neighbors(n);
            std::vector<MBPosterior> inputs;
            inputs.reserve(nbrs.size() + 1);
            inputs.push_back(locals[static_cast<std::size_t>(n)]);
            for (int nb : nbrs) inputs.push_back(locals[static_cast<std::size_t>(nb)]);
            const std::vector<FusionWeights> folds =
                detail::fold_weights(config.topology, n);

            Rng fusion_rng = make_rng(seed, {run_index, detail::kSaltFusion, uk, un});
            const MBPosterior fused =
                sequential_fuse(inputs, folds, config.fusion, fusion_rng);
            std::vector<State> fused_estimates = extract_estimates(fused, config.filter);

            StepRecord record;
            record.step = k;
            record.node = n;
            record.local_ospa =
                ospa(detail::positions(local_estimates[static_cast<std::size_t>(n)]),
                     truth_xy, config.ospa_params);
            record.fused_ospa =
                ospa(detail::positions(fused_estimates), truth_xy, config.ospa_params);
            record.card_local =
                static_cast<int>(local_estimates[static_cast<std::size_t>(n)].size());
            record.card_fused = static_cast<int>(fused_estimates.size());
            record.approx_error = approximation_error(
                locals[static_cast<std::size_t>(n)],
                local_estimates[static_cast<std::size_t>(n)],
                folds.empty() ? 1.0 : folds.front().w1);
            record.local_estimates = local_estimates[static_cast<std::size_t>(n)];
            record.fused_estimates = std::move(fused_estimates);
            records.push_back(std::move(record));

            if (config.mode == WorkMode::M2 && !nbrs.empty()) {
                // Feedback: the fused posterior (plus any unrepresented local
                // tracks, see feedback_posterior) becomes the working
                // posterior, compacted back to the filter's per-track particle
                // budget. An isolated node fused nothing in, so it keeps its
                // local posterior and both modes coincide.
                const MBPosterior feedback =
                    feedback_posterior(locals[static_cast<std::size_t>(n)], fused,
                                       config.feedback_retention_distance);
                working[static_cast<std::size_t>(n)] = regularize_tracks(
                    resample_tracks(feedback, config.filter.particles_per_track,
                                    fusion_rng),
                    fusion_rng);
            }
        }
        for (int n = 0; n < nodes; ++n) {
            if (config.mode == WorkMode::M1 || config.topology.neighbors(n).empty()) {
                working[static_cast<std::size_t>(n)] =
                    std::move(locals[static_cast<std::size_t>(n)]);
            }
        }
    }
    return records;
}

// ---- Monte-Carlo aggregation ----

/// Per-(scan, node) means over runs.
struct StepAggregate {
    int step = 0;
    int node = 0;
    double local_ospa = 0.0;
    double fused_ospa = 0.0;
    double card_local = 0.0;
    double card_fused = 0.0;
    double approx_error = 0.0;
};

/// Cross-run summary of a scenario.
struct MonteCarloSummary {
    int runs = 0;
    std::vector<StepAggregate> per_step;  // ordered by (step, node)
    double mean_local_ospa = 0.0;         // over every (run, scan, node)
    double mean_fused_ospa = 0.0;
    /// Share of fused estimates whose OSPA is below the efficiency threshold.
    double efficiency = 0.0;
    /// Mean approximation error over the efficient records (over all records
    /// when none qualify, so the field stays finite).
    double mean_approx_error = 0.0;
};

/// Worker-pool size for Monte-Carlo runs: GCIMB_THREADS when set, otherwise
/// the hardware concurrency, clamped to [1, runs].
[[nodiscard]] inline int worker_count(int runs) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GCIMB_THREADS")) {
        workers = std::atoi(env);
    }
    return std::clamp(workers, 1, std::max(runs, 1));
}

/// Run `runs` independent replicates (per-run seeds derived from base_seed
/// and the run index) and average. Aggregation happens in fixed run order,
/// so the summary does not depend on the thread schedule.
[[nodiscard]] inline MonteCarloSummary monte_carlo(const ScenarioConfig& config, int runs,
                                                   std::uint64_t base_seed) {
    if (runs < 1) throw std::invalid_argument("monte_carlo: runs must be >= 1");
    validate(config);

    std::vector<std::vector<StepRecord>> results(static_cast<std::size_t>(runs));
    std::atomic<int> next{0};
    const auto work = [&] {
        for (int run = next.fetch_add(1); run < runs; run = next.fetch_add(1)) {
            results[static_cast<std::size_t>(run)] =
                run_scenario(config, base_seed, static_cast<std::uint64_t>(run));
        }
    };
    const int workers = worker_count(runs);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    MonteCarloSummary summary;
    summary.runs = runs;
    const int nodes = config.topology.node_count();
    summary.per_step.resize(static_cast<std::size_t>(config.steps * nodes));
    for (int k = 0; k < config.steps; ++k) {
        for (int n = 0; n < nodes; ++n) {
            StepAggregate& agg = summary.per_step[static_cast<std::size_t>(k * nodes + n)];
            agg.step = k + 1;
            agg.node = n;
        }
    }

    std::vector<double> fused_series;
    fused_series.reserve(results.size() * summary.per_step.size());
    double approx_efficient = 0.0;
    double approx_all = 0.0;
    std::size_t efficient = 0;
    for (const auto& run : results) {
        for (const StepRecord& rec : run) {
            StepAggregate& agg =
                summary.per_step[static_cast<std::size_t>((rec.step - 1) * nodes + rec.node)];
            agg.local_ospa += rec.local_ospa;
            agg.fused_ospa += rec.fused_ospa;
            agg.card_local += rec.card_local;
            agg.card_fused += rec.card_fused;
            agg.approx_error += rec.approx_error;
            summary.mean_local_ospa += rec.local_ospa;
            summary.mean_fused_ospa += rec.fused_ospa;
            fused_series.push_back(rec.fused_ospa);
            approx_all += rec.approx_error;
            if (rec.fused_ospa < config.efficiency_threshold) {
                approx_efficient += rec.approx_error;
                ++efficient;
            }
        }
    }
    for (StepAggregate& agg : summary.per_step) {
        agg.local_ospa /= runs;
        agg.fused_ospa /= runs;
        agg.card_local /= runs;
        agg.card_fused /= runs;
        agg.approx_error /= runs;
    }
    const auto total = static_cast<double>(fused_series.size());
    summary.mean_local_ospa /= total;
    summary.mean_fused_ospa /= total;
    summary.efficiency = efficiency_proportion(fused_series, config.efficiency_threshold);
    summary.mean_approx_error = efficient > 0
                                    ? approx_efficient / static_cast<double>(efficient)
                                    : approx_all / total;
    return summary;
}

}  // namespace gcimb
