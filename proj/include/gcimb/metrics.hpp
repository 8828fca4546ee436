#pragma once

#include "gcimb/assignment.hpp"
#include "gcimb/log_sum_exp.hpp"
#include "gcimb/multi_bernoulli.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gcimb {

// ---- OSPA miss-distance ----

/// OSPA parameters: cutoff c (also the per-miss penalty) and order p.
struct OspaParams {
    double c = 5.0;
    double p = 1.0;
};

/// Optimal sub-pattern assignment distance between two finite state sets:
/// optimal assignment over cutoff distances plus a cardinality penalty of c
/// per unmatched state, normalized by the larger cardinality.  Lies in
/// [0, c]; symmetric; zero iff the sets match exactly.
[[nodiscard]] inline double ospa(const std::vector<Eigen::VectorXd>& x,
                                 const std::vector<Eigen::VectorXd>& y,
                                 const OspaParams& params = {}) {
    if (!(params.c > 0.0)) throw std::invalid_argument("ospa: cutoff c must be positive");
    if (!(params.p >= 1.0)) throw std::invalid_argument("ospa: order p must be >= 1");
    if (x.empty() && y.empty()) return 0.0;
    if (x.empty() || y.empty()) return params.c;

    const std::vector<Eigen::VectorXd>& small = x.size() <= y.size() ? x : y;
    const std::vector<Eigen::VectorXd>& big = x.size() <= y.size() ? y : x;
    const auto n_small = static_cast<Eigen::Index>(small.size());
    const auto n_big = static_cast<Eigen::Index>(big.size());

    Eigen::MatrixXd cost(n_small, n_big);
    for (Eigen::Index i = 0; i < n_small; ++i) {
        for (Eigen::Index j = 0; j < n_big; ++j) {
            const auto& a = small[static_cast<std::size_t>(i)];
            const auto& b = big[static_cast<std::size_t>(j)];
            if (a.size() != b.size()) {
                throw std::invalid_argument("ospa: mixed state dimensions");
            }
            cost(i, j) = std::pow(std::min(params.c, (a - b).norm()), params.p);
        }
    }
    const double matched = min_assignment_cost(cost);
    const double card_penalty =
        std::pow(params.c, params.p) * static_cast<double>(n_big - n_small);
    return std::pow((matched + card_penalty) / static_cast<double>(n_big), 1.0 / params.p);
}

// ---- Powered-sum approximation error ----

/// Diagnostics for the powered-sum surrogate of an exponentiated MB density
/// at one multi-target state estimate.
struct ApproximationReport {
    /// log(Q^I * prod_i p_{I(i)}(x_i)) per index sequence of H(n), in
    /// lexicographic order of the sequences.
    std::vector<double> log_terms;
    /// log of the exact MB density value (log-sum-exp of log_terms).
    double log_exact = kLogZero;
    /// Exact exponentiated density pi(X)^omega.
    double exact_powered = 0.0;
    /// Powered-sum surrogate P(X) = sum_I (Q^I)^omega (prod p)^omega.
    double powered_sum = 0.0;
    /// Absolute error E = |pi(X)^omega - P(X)|.
    double error = 0.0;
    /// Share of the exact density carried by its largest term; close to 1
    /// when the posterior is well separated.
    double dominant_ratio = 0.0;
};

namespace detail {

/// All ordered sequences of `n` distinct indices from {0..m-1}, lexicographic.
template <typename Fn>
void for_each_index_sequence(std::size_t m, std::size_t n, std::vector<std::size_t>& seq,
                             std::vector<bool>& used, const Fn& fn) {
    if (seq.size() == n) {
        fn(seq);
        return;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (used[i]) continue;
        used[i] = true;
        seq.push_back(i);
        for_each_index_sequence(m, n, seq, used, fn);
        seq.pop_back();
        used[i] = false;
    }
}

} // namespace detail

/// Evaluate the exact exponentiated MB density and its powered-sum surrogate
/// at the estimate set `xhat`, entirely in the log domain.  Requires
/// |xhat| <= track count and omega in (0, 1].
[[nodiscard]] inline ApproximationReport approximation_report(
    const MBPosterior& mb, const std::vector<Eigen::VectorXd>& xhat, double omega) {
    if (xhat.size() > mb.track_count()) {
        throw std::domain_error("approximation_report: more estimates than tracks");
    }
    if (!(omega > 0.0 && omega <= 1.0)) {
        throw std::domain_error("approximation_report: omega must lie in (0,1]");
    }
    const std::size_t m = mb.track_count();
    const std::size_t n = xhat.size();

    // Per (track, estimate) log-density table.
    Eigen::MatrixXd log_p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t l = 0; l < m; ++l) {
        for (std::size_t i = 0; i < n; ++i) {
            log_p(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(i)) =
                mb.track(l).density.log_eval(xhat[i]);
        }
    }

    ApproximationReport report;
    std::vector<std::size_t> seq;
    std::vector<bool> used(m, false);
    seq.reserve(n);
    detail::for_each_index_sequence(
        m, n, seq, used, [&](const std::vector<std::size_t>& idx) {
            double lt = std::log(joint_existence_weight(mb, idx));
            for (std::size_t i = 0; i < n; ++i) {
                lt += log_p(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(i));
            }
            report.log_terms.push_back(lt);
        });

    report.log_exact = log_sum_exp(report.log_terms);
    if (report.log_exact > kLogZero) {
        report.exact_powered = std::exp(omega * report.log_exact);
        std::vector<double> powered(report.log_terms.size());
        std::transform(report.log_terms.begin(), report.log_terms.end(), powered.begin(),
                       [omega](double lt) { return omega * lt; });
        report.powered_sum = std::exp(log_sum_exp(powered));
        const double max_term = *std::max_element(report.log_terms.begin(),
                                                  report.log_terms.end());
        report.dominant_ratio = std::exp(max_term - report.log_exact);
    }
    report.error = std::abs(report.exact_powered - report.powered_sum);
    return report;
}

/// Absolute error between the exact exponentiated MB density and the
/// powered-sum surrogate at `xhat`.
[[nodiscard]] inline double approximation_error(const MBPosterior& mb,
                                                const std::vector<Eigen::VectorXd>& xhat,
                                                double omega) {
    return approximation_report(mb, xhat, omega).error;
}

// ---- Efficient-estimation proportion ----

/// Proportion of OSPA values strictly below `threshold`.
[[nodiscard]] inline double efficiency_proportion(const std::vector<double>& ospa_series,
                                                  double threshold) {
    if (ospa_series.empty()) {
        throw std::domain_error("efficiency_proportion: empty series");
    }
    if (!(threshold > 0.0)) {
        throw std::domain_error("efficiency_proportion: threshold must be positive");
    }
    const auto efficient = std::count_if(ospa_series.begin(), ospa_series.end(),
                                         [threshold](double d) { return d < threshold; });
    return static_cast<double>(efficient) / static_cast<double>(ospa_series.size());
}

} // namespace gcimb
