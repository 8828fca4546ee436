#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace gcimb {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(Σ exp(v_i)) with the usual max-shift so that huge negative logs do not
/// underflow the sum. Accumulation order is the input order (reproducibility).
[[nodiscard]] inline double log_sum_exp(std::span<const double> logs) {
    double m = kLogZero;
    for (double v : logs) m = std::max(m, v);
    if (!std::isfinite(m)) return kLogZero; // all terms are -inf (or empty)
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - m);
    return m + std::log(acc);
}

[[nodiscard]] inline double log_sum_exp(const std::vector<double>& logs) {
    return log_sum_exp(std::span<const double>(logs));
}

/// In-place exp(v_i - log_norm); turns normalized log weights into weights.
inline void exp_normalize(std::vector<double>& logs) {
    const double norm = log_sum_exp(logs);
    for (double& v : logs) {
        v = std::isfinite(norm) ? std::exp(v - norm) : 0.0;
    }
}

} // namespace gcimb
