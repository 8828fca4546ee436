#pragma once

#include "gcimb/log_sum_exp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace gcimb {

/// Floor on per-dimension kernel bandwidths; keeps collapsed particle clouds
/// evaluable (a zero bandwidth would make the kernel a delta).
inline constexpr double kBandwidthFloor = 1e-3;

/// Rule-of-thumb kernel bandwidth h = sigma * (4 / (3 n))^(1/5), floored at
/// kBandwidthFloor so degenerate samples (sigma = 0) stay usable.
[[nodiscard]] inline double rut_bandwidth(double sigma, std::size_t n) {
    if (n == 0) throw std::domain_error("rut_bandwidth: sample count must be >= 1");
    if (!(sigma >= 0.0)) throw std::domain_error("rut_bandwidth: sigma must be nonnegative");
    const double h = sigma * std::pow(4.0 / (3.0 * static_cast<double>(n)), 0.2);
    return std::max(h, kBandwidthFloor);
}

/// Gaussian kernel density estimate over a set of equal-weight centers:
///   p(x) = (1/L) sum_m N(x; x_m, kernelCov).
///
/// The kernel covariance is fitted by whitening the cloud with the inverse
/// square root of its (regularized) empirical covariance, applying the
/// rule-of-thumb bandwidth per whitened dimension, and transporting the
/// diagonal bandwidth matrix back: kernelCov = T diag(h^2) T' with T the
/// inverse whitener.
class KdeDensity {
public:
    /// Direct construction from centers (d x L, one column per particle) and
    /// an explicit kernel covariance. Whitener is reported as identity.
    KdeDensity(Eigen::MatrixXd centers, const Eigen::MatrixXd& kernel_cov)
        : centers_(std::move(centers)),
          kernel_cov_(kernel_cov),
          whitener_(Eigen::MatrixXd::Identity(kernel_cov.rows(), kernel_cov.cols())),
          empirical_cov_(Eigen::MatrixXd::Zero(kernel_cov.rows(), kernel_cov.cols())),
          bandwidths_(kernel_cov.diagonal().cwiseSqrt()) {
        finish_setup_();
    }

    /// Fit a KDE to an equal-weight particle cloud (d x L).
    [[nodiscard]] static KdeDensity fit(const Eigen::MatrixXd& centers) {
        if (centers.cols() < 1) throw std::domain_error("KdeDensity::fit: empty cloud");
        const auto d = centers.rows();
        const auto count = centers.cols();

        const Eigen::VectorXd mean = centers.rowwise().mean();
        const Eigen::MatrixXd centered = centers.colwise() - mean;
        const double denom = count > 1 ? static_cast<double>(count - 1) : 1.0;
        Eigen::MatrixXd emp_cov = (centered * centered.transpose()) / denom;

        const double trace = emp_cov.trace();
        Eigen::MatrixXd whitener;
        Eigen::MatrixXd unwhitener;
        if (trace <= 0.0 || count == 1) {
            // Collapsed cloud: nothing to whiten; kernel falls back to the
            // floored bandwidth on each raw axis.
            whitener = Eigen::MatrixXd::Identity(d, d);
            unwhitener = whitener;
            emp_cov += 1e-6 * Eigen::MatrixXd::Identity(d, d);
        } else {
            emp_cov += (1e-8 * trace / static_cast<double>(d))
                       * Eigen::MatrixXd::Identity(d, d);
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(emp_cov);
            const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
            // Symmetric square root: W = V diag(1/sqrt(lambda)) V'.
            whitener = eig.eigenvectors() * roots.cwiseInverse().asDiagonal()
                       * eig.eigenvectors().transpose();
            unwhitener = eig.eigenvectors() * roots.asDiagonal()
                         * eig.eigenvectors().transpose();
        }

        // Rule-of-thumb bandwidth per whitened dimension.
        const Eigen::MatrixXd whitened = whitener * centered;
        Eigen::VectorXd h(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            const double var = whitened.row(k).squaredNorm() / denom;
            h(k) = rut_bandwidth(std::sqrt(std::max(var, 0.0)),
                                 static_cast<std::size_t>(count));
        }

        const Eigen::MatrixXd kernel_cov =
            unwhitener * h.array().square().matrix().asDiagonal()
            * unwhitener.transpose();

        KdeDensity kde(centers, kernel_cov);
        kde.whitener_ = whitener;
        kde.empirical_cov_ = emp_cov;
        kde.bandwidths_ = h;
        return kde;
    }

    // ---- Accessors ----

    [[nodiscard]] const Eigen::MatrixXd& centers() const { return centers_; }
    [[nodiscard]] Eigen::Index count() const { return centers_.cols(); }
    [[nodiscard]] Eigen::Index dim() const { return centers_.rows(); }
    [[nodiscard]] const Eigen::MatrixXd& kernel_cov() const { return kernel_cov_; }
    [[nodiscard]] const Eigen::MatrixXd& whitener() const { return whitener_; }
    [[nodiscard]] const Eigen::MatrixXd& empirical_cov() const { return empirical_cov_; }
    /// Per-(whitened-)dimension bandwidths h.
    [[nodiscard]] const Eigen::VectorXd& bandwidths() const { return bandwidths_; }
    /// Per-dimension kernel standard deviation in original coordinates.
    [[nodiscard]] Eigen::VectorXd kernel_std() const {
        return kernel_cov_.diagonal().cwiseSqrt();
    }

    // ---- Evaluation (log domain with max-shift) ----

    /// log p(x) for the equal-weight estimate (1/L) sum_m N(x; x_m, Sigma).
    [[nodiscard]] double log_eval(const Eigen::VectorXd& x) const {
        double m = kLogZero;
        const Eigen::VectorXd q = quad_exponents_(x, m);
        if (!std::isfinite(m)) return kLogZero;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < q.size(); ++i) acc += std::exp(q(i) - m);
        return m + std::log(acc) + log_norm_ - std::log(static_cast<double>(count()));
    }

    /// log of sum_m w_m N(x; x_m, Sigma) for externally supplied particle
    /// weights (len L); used when a cloud has been reweighted in place.
    [[nodiscard]] double log_eval_weighted(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& weights) const {
        double m = kLogZero;
        const Eigen::VectorXd q = quad_exponents_(x, m);
        if (!std::isfinite(m)) return kLogZero;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < q.size(); ++i) acc += weights(i) * std::exp(q(i) - m);
        if (acc <= 0.0) return kLogZero;
        return m + std::log(acc) + log_norm_;
    }

    [[nodiscard]] double eval(const Eigen::VectorXd& x) const {
        return std::exp(log_eval(x));
    }

private:
    /// -(1/2) (x - x_m)' Sigma^{-1} (x - x_m) for all m; also reports the max.
    [[nodiscard]] Eigen::VectorXd quad_exponents_(const Eigen::VectorXd& x,
                                                  double& max_out) const {
        const Eigen::VectorXd xw = kernel_whitener_ * x;
        Eigen::VectorXd q =
            -0.5 * (whitened_centers_.colwise() - xw).colwise().squaredNorm().transpose();
        max_out = q.size() > 0 ? q.maxCoeff() : kLogZero;
        return q;
    }

    void finish_setup_() {
        const auto d = kernel_cov_.rows();
        const Eigen::LLT<Eigen::MatrixXd> llt(kernel_cov_);
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("KdeDensity: kernel covariance not positive definite");
        }
        // Whitening factor of the kernel itself: A = L^{-1} so that
        // (x-c)' Sigma^{-1} (x-c) = |A x - A c|^2.
        kernel_whitener_ = llt.matrixL().solve(Eigen::MatrixXd::Identity(d, d));
        whitened_centers_ = kernel_whitener_ * centers_;
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            log_det += 2.0 * std::log(llt.matrixL()(i, i));
        }
        log_norm_ = -0.5 * (static_cast<double>(d) * std::log(2.0 * M_PI) + log_det);
    }

    Eigen::MatrixXd centers_;           // d x L particle locations
    Eigen::MatrixXd kernel_cov_;        // Sigma
    Eigen::MatrixXd whitener_;          // W = empiricalCov^{-1/2}
    Eigen::MatrixXd empirical_cov_;     // regularized cloud covariance
    Eigen::VectorXd bandwidths_;        // h per whitened dimension
    Eigen::MatrixXd kernel_whitener_;   // Sigma^{-1/2} (Cholesky form)
    Eigen::MatrixXd whitened_centers_;  // kernel_whitener_ * centers
    double log_norm_ = 0.0;             // log of the Gaussian normalizer
};

} // namespace gcimb
