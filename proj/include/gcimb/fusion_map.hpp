#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gcimb {

/// Injective assignment of a subset I1 of one posterior's track indices to
/// track indices of another posterior: theta(source_i) = target_i. Declares
/// which track pairs are fused together in one hypothesis.
class FusionMap {
public:
    FusionMap() = default;

    FusionMap(std::vector<std::size_t> sources, std::vector<std::size_t> targets)
        : sources_(std::move(sources)), targets_(std::move(targets)) {
        if (sources_.size() != targets_.size()) {
            throw std::domain_error("FusionMap: source/target length mismatch");
        }
        for (std::size_t i = 1; i < sources_.size(); ++i) {
            if (sources_[i - 1] >= sources_[i]) {
                throw std::domain_error("FusionMap: sources must be strictly increasing");
            }
        }
        auto t = targets_;
        std::sort(t.begin(), t.end());
        if (std::adjacent_find(t.begin(), t.end()) != t.end()) {
            throw std::domain_error("FusionMap: targets must be distinct (injectivity)");
        }
    }

    /// The fused subset I1, ascending.
    [[nodiscard]] const std::vector<std::size_t>& sources() const { return sources_; }
    /// theta(sources()[i]) = targets()[i].
    [[nodiscard]] const std::vector<std::size_t>& targets() const { return targets_; }
    [[nodiscard]] std::size_t size() const { return sources_.size(); }
    [[nodiscard]] bool empty() const { return sources_.empty(); }

    [[nodiscard]] bool contains_source(std::size_t l) const {
        return std::binary_search(sources_.begin(), sources_.end(), l);
    }

    [[nodiscard]] std::size_t target_of(std::size_t l) const {
        const auto it = std::lower_bound(sources_.begin(), sources_.end(), l);
        if (it == sources_.end() || *it != l) {
            throw std::domain_error("FusionMap: index not in the fused subset");
        }
        return targets_[static_cast<std::size_t>(it - sources_.begin())];
    }

    [[nodiscard]] bool operator==(const FusionMap& other) const {
        return sources_ == other.sources_ && targets_ == other.targets_;
    }

private:
    std::vector<std::size_t> sources_;
    std::vector<std::size_t> targets_;
};

} // namespace gcimb
