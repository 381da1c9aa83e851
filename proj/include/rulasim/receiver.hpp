#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rulasim {

/// Raised when the estimated channel matrix is rank deficient or its
/// condition number exceeds the configured cap. Sweeps count these
/// realizations as excluded rather than propagating SINR artifacts.
struct SingularChannelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-user SINR (linear) and achievable SE (bit/s/Hz) for one channel
/// realization.
struct SinrReport {
  Eigen::VectorXd sinr;
  Eigen::VectorXd se;
};

/// Zero-forcing combiner V = H_hat (H_hat^H H_hat)^{-1}, computed through
/// a thin SVD rather than an explicit Gram inverse: with H = U S W^H the
/// combiner is U S^{-1} W^H, which satisfies V^H H = I for full-rank input.
inline Eigen::MatrixXcd zf_combiner(const Eigen::MatrixXcd& estimated_channels,
                                    double condition_cap = 1e8) {
  const Eigen::Index m = estimated_channels.rows();
  const Eigen::Index k = estimated_channels.cols();
  if (m < k) {
    throw std::invalid_argument(
        "zf_combiner: need at least as many antennas as users");
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      estimated_channels, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(k - 1) <= 0.0 || sv(0) > condition_cap * sv(k - 1)) {
    throw SingularChannelError(
        "zf_combiner: channel matrix is rank deficient or too ill-conditioned");
  }
  return svd.matrixU() *
         sv.cwiseInverse().cast<std::complex<double>>().asDiagonal() *
         svd.matrixV().adjoint();
}

/// SINR of user k:
///   gamma_k = p |v_k^H h_k|^2 /
///             (p sum_{k' != k} |v_k^H h_k'|^2 + sigma_n^2 ||v_k||^2),
/// evaluated with the TRUE channels for both signal and interference while
/// the combiner came from the estimates. SE_k = log2(1 + gamma_k).
inline SinrReport compute_sinr(const Eigen::MatrixXcd& true_channels,
                               const Eigen::MatrixXcd& combiner,
                               double tx_power_w, double noise_power_w) {
  if (true_channels.rows() != combiner.rows() ||
      true_channels.cols() != combiner.cols()) {
    throw std::invalid_argument("compute_sinr: dimension mismatch");
  }
  if (tx_power_w <= 0.0 || noise_power_w <= 0.0) {
    throw std::invalid_argument(
        "compute_sinr: power and noise must be positive");
  }
  const Eigen::Index k_count = true_channels.cols();
  const Eigen::MatrixXcd cross = combiner.adjoint() * true_channels;  // K x K

  SinrReport report;
  report.sinr.resize(k_count);
  report.se.resize(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const double signal = std::norm(cross(k, k));
    const double total = cross.row(k).squaredNorm();
    const double interference = total - signal;
    const double noise = noise_power_w * combiner.col(k).squaredNorm();
    const double gamma =
        tx_power_w * signal / (tx_power_w * interference + noise);
    report.sinr(k) = gamma;
    report.se(k) = std::log2(1.0 + gamma);
  }
  return report;
}

/// Mean per-user achievable SE: expectation over channel realizations per
/// user first, then the average over users.
inline double mean_per_user_se(const std::vector<SinrReport>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("mean_per_user_se: no reports");
  }
  const Eigen::Index k_count = reports.front().se.size();
  Eigen::VectorXd per_user = Eigen::VectorXd::Zero(k_count);
  for (const SinrReport& report : reports) {
    if (report.se.size() != k_count) {
      throw std::invalid_argument("mean_per_user_se: inconsistent user count");
    }
    per_user += report.se;
  }
  per_user /= static_cast<double>(reports.size());
  return per_user.mean();
}

}  // namespace rulasim
