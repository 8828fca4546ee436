#pragma once

#include "gcimb/kde.hpp"
#include "gcimb/log_sum_exp.hpp"
#include "gcimb/rng.hpp"
#include "gcimb/state.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gcimb {

namespace detail {

/// An immutable particle block: the unit of KDE fitting. A slab is born from
/// one cloud (initialization, resampling, or a fused pair) and its kernel
/// covariance is fitted lazily, once, from the birth-time cloud.
class Slab {
public:
    explicit Slab(Eigen::MatrixXd centers, Eigen::VectorXd birth_weights = {})
        : centers_(std::move(centers)), birth_weights_(std::move(birth_weights)) {
        if (centers_.cols() < 1) {
            throw std::domain_error("Slab: a particle block needs at least one particle");
        }
    }

    [[nodiscard]] const Eigen::MatrixXd& centers() const { return centers_; }
    [[nodiscard]] Eigen::Index count() const { return centers_.cols(); }
    [[nodiscard]] Eigen::Index dim() const { return centers_.rows(); }

    /// The slab's kernel estimate. Clouds born with unequal weights are
    /// deterministically resampled to equal weights before fitting, so the
    /// estimate keeps the plain equal-weight form.
    [[nodiscard]] const KdeDensity& kde() const {
        std::call_once(fitted_, [this] {
            if (birth_weights_.size() == 0) {
                kde_ = std::make_unique<KdeDensity>(KdeDensity::fit(centers_));
            } else {
                kde_ = std::make_unique<KdeDensity>(
                    KdeDensity::fit(systematic_pick_(centers_, birth_weights_)));
            }
        });
        return *kde_;
    }

private:
    /// Systematic resampling with the deterministic mid-cell offset 0.5/N;
    /// pure function of the inputs so the lazy fit stays reproducible.
    [[nodiscard]] static Eigen::MatrixXd systematic_pick_(const Eigen::MatrixXd& centers,
                                                          const Eigen::VectorXd& weights) {
        const Eigen::Index n = centers.cols();
        const double total = weights.sum();
        Eigen::MatrixXd picked(centers.rows(), n);
        Eigen::Index src = 0;
        double cum = weights(0) / total;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
            while (cum < u && src + 1 < n) {
                ++src;
                cum += weights(src) / total;
            }
            picked.col(k) = centers.col(src);
        }
        return picked;
    }

    Eigen::MatrixXd centers_;
    Eigen::VectorXd birth_weights_;  // empty means equal weights
    mutable std::once_flag fitted_;
    mutable std::unique_ptr<KdeDensity> kde_;
};

} // namespace detail

/// Empirical (particle) density: a weighted set of state samples, evaluable
/// as a continuous density through per-block kernel estimates.
///
/// The particles are organized in blocks, each referencing an immutable slab.
/// Reweighting touches only the weights; mixing densities (moment matching)
/// pools blocks without refitting, so a pooled density evaluates exactly as
/// the corresponding mixture of its sources.
class ParticleDensity {
public:
    ParticleDensity() = default;

    /// Equal-weight cloud (d x L, one column per particle), total mass 1.
    [[nodiscard]] static ParticleDensity from_centers(Eigen::MatrixXd centers) {
        ParticleDensity pd;
        const Eigen::Index n = centers.cols();
        Block b;
        b.slab = std::make_shared<const detail::Slab>(std::move(centers));
        b.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        pd.blocks_.push_back(std::move(b));
        return pd;
    }

    /// Weighted cloud; weights are normalized to total mass 1.
    [[nodiscard]] static ParticleDensity from_weighted(Eigen::MatrixXd centers,
                                                       Eigen::VectorXd weights) {
        if (weights.size() != centers.cols()) {
            throw std::domain_error("ParticleDensity: weight/center count mismatch");
        }
        if ((weights.array() < 0.0).any()) {
            throw std::domain_error("ParticleDensity: negative particle weight");
        }
        const double total = weights.sum();
        if (!(total > 0.0)) {
            throw std::domain_error("ParticleDensity: all particle weights are zero");
        }
        ParticleDensity pd;
        Block b;
        b.weights = weights / total;
        b.slab = std::make_shared<const detail::Slab>(std::move(centers), std::move(weights));
        pd.blocks_.push_back(std::move(b));
        return pd;
    }

    /// Pool existing densities into a mixture: sum_i coefficient_i * density_i.
    /// Blocks sharing a slab are merged, so repeated components stay compact.
    [[nodiscard]] static ParticleDensity mixture(
        const std::vector<std::pair<double, const ParticleDensity*>>& components) {
        ParticleDensity pd;
        for (const auto& [coef, src] : components) {
            if (coef <= 0.0 || src == nullptr) continue;
            for (const Block& b : src->blocks_) {
                Block* existing = nullptr;
                for (Block& mine : pd.blocks_) {
                    if (mine.slab == b.slab) {
                        existing = &mine;
                        break;
                    }
                }
                if (existing != nullptr) {
                    existing->weights += coef * b.weights;
                } else {
                    pd.blocks_.push_back(Block{b.slab, coef * b.weights});
                }
            }
        }
        return pd;
    }

    // ---- Shape ----

    [[nodiscard]] bool empty() const { return blocks_.empty(); }
    [[nodiscard]] std::size_t block_count() const { return blocks_.size(); }
    [[nodiscard]] Eigen::Index size() const {
        Eigen::Index n = 0;
        for (const Block& b : blocks_) n += b.slab->count();
        return n;
    }
    [[nodiscard]] Eigen::Index dim() const {
        return blocks_.empty() ? 0 : blocks_.front().slab->dim();
    }
    [[nodiscard]] double mass() const {
        double m = 0.0;
        for (const Block& b : blocks_) m += b.weights.sum();
        return m;
    }

    /// All particle locations, concatenated block by block (d x size()).
    [[nodiscard]] Eigen::MatrixXd centers_concat() const {
        Eigen::MatrixXd all(dim(), size());
        Eigen::Index at = 0;
        for (const Block& b : blocks_) {
            all.middleCols(at, b.slab->count()) = b.slab->centers();
            at += b.slab->count();
        }
        return all;
    }

    /// All particle weights in the same order as centers_concat().
    [[nodiscard]] Eigen::VectorXd weights_concat() const {
        Eigen::VectorXd all(size());
        Eigen::Index at = 0;
        for (const Block& b : blocks_) {
            all.segment(at, b.weights.size()) = b.weights;
            at += b.weights.size();
        }
        return all;
    }

    [[nodiscard]] std::vector<WeightedParticle> particles() const {
        std::vector<WeightedParticle> out(static_cast<std::size_t>(size()));
        Eigen::Index at = 0;
        for (const Block& b : blocks_) {
            for (Eigen::Index i = 0; i < b.slab->count(); ++i, ++at) {
                out[static_cast<std::size_t>(at)] = {b.slab->centers().col(i), b.weights(i)};
            }
        }
        return out;
    }

    // ---- Moments ----

    [[nodiscard]] Eigen::VectorXd mean() const {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(dim());
        for (const Block& b : blocks_) m += b.slab->centers() * b.weights;
        const double total = mass();
        return total > 0.0 ? Eigen::VectorXd(m / total) : m;
    }

    // ---- Weight bookkeeping ----

    /// Scale all weights so the total mass is exactly 1.
    void normalize() {
        const double total = mass();
        if (!(total > 0.0)) {
            throw std::domain_error("ParticleDensity::normalize: zero total mass");
        }
        for (Block& b : blocks_) b.weights /= total;
    }

    /// Same particles and kernels, new weights (concatenated order).
    [[nodiscard]] ParticleDensity reweighted(const Eigen::VectorXd& new_weights) const {
        if (new_weights.size() != size()) {
            throw std::domain_error("ParticleDensity::reweighted: weight count mismatch");
        }
        ParticleDensity pd;
        Eigen::Index at = 0;
        for (const Block& b : blocks_) {
            pd.blocks_.push_back(Block{b.slab, new_weights.segment(at, b.weights.size())});
            at += b.weights.size();
        }
        return pd;
    }

    // ---- Continuous evaluation ----

    /// log p(x) where p is the mixture of per-block kernel estimates,
    /// weighted by the current particle weights.
    [[nodiscard]] double log_eval(const Eigen::VectorXd& x) const {
        std::vector<double> parts;
        parts.reserve(blocks_.size());
        for (const Block& b : blocks_) {
            parts.push_back(b.slab->kde().log_eval_weighted(x, b.weights));
        }
        return log_sum_exp(parts);
    }

    [[nodiscard]] double eval(const Eigen::VectorXd& x) const { return std::exp(log_eval(x)); }

    /// Per-dimension kernel standard deviation (original coordinates);
    /// elementwise max over blocks for pooled densities.
    [[nodiscard]] Eigen::VectorXd kernel_std() const {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(dim());
        for (const Block& b : blocks_) s = s.cwiseMax(b.slab->kde().kernel_std());
        return s;
    }

    // ---- Resampling ----

    /// Systematic (low-variance) resampling to `count` equal-weight particles.
    [[nodiscard]] ParticleDensity resample(Eigen::Index count, Rng& rng) const {
        if (empty() || count < 1) {
            throw std::domain_error("ParticleDensity::resample: nothing to resample");
        }
        const Eigen::MatrixXd all = centers_concat();
        Eigen::VectorXd w = weights_concat();
        const double total = w.sum();
        if (!(total > 0.0)) {
            throw std::domain_error("ParticleDensity::resample: zero total mass");
        }
        w /= total;

        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double offset = unif(rng) / static_cast<double>(count);
        Eigen::MatrixXd picked(all.rows(), count);
        Eigen::Index src = 0;
        double cum = w(0);
        for (Eigen::Index k = 0; k < count; ++k) {
            const double u = offset + static_cast<double>(k) / static_cast<double>(count);
            while (cum < u && src + 1 < all.cols()) {
                ++src;
                cum += w(src);
            }
            picked.col(k) = all.col(src);
        }
        return from_centers(std::move(picked));
    }

private:
    struct Block {
        std::shared_ptr<const detail::Slab> slab;
        Eigen::VectorXd weights;  // per particle; block mass = weights.sum()
    };

    std::vector<Block> blocks_;
};

/// Kernel estimate of a whole particle density (equal-weight single blocks
/// reuse the cached per-block fit; anything else is resampled and refitted).
[[nodiscard]] inline KdeDensity fit_kde(const ParticleDensity& pd) {
    if (pd.empty()) throw std::domain_error("fit_kde: empty density");
    if (pd.block_count() == 1) {
        const Eigen::VectorXd w = pd.weights_concat();
        const double expected = w.sum() / static_cast<double>(w.size());
        if (((w.array() - expected).abs() < 1e-12 * std::max(1.0, expected)).all()) {
            return KdeDensity::fit(pd.centers_concat());
        }
    }
    // Deterministic equal-weight reduction, then the plain fit.
    Eigen::VectorXd w = pd.weights_concat();
    const Eigen::MatrixXd all = pd.centers_concat();
    const Eigen::Index n = all.cols();
    Eigen::MatrixXd picked(all.rows(), n);
    Eigen::Index src = 0;
    double cum = w(0) / w.sum();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
        while (cum < u && src + 1 < n) {
            ++src;
            cum += w(src) / w.sum();
        }
        picked.col(k) = all.col(src);
    }
    return KdeDensity::fit(picked);
}

} // namespace gcimb
