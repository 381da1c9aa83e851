#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rulasim/geometry.hpp"
#include "rulasim/rng.hpp"

namespace rulasim {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double value) { return 10.0 * std::log10(value); }

/// Radio-frequency parameters shared by all links.
struct RfConfig {
  double carrier_frequency_hz = 3.5e9;
  double bandwidth_hz = 20e6;
  double noise_psd_w_per_hz = 4e-21;      // N_0
  double noise_figure_db = 9.0;           // N_F
  double tx_power_w = 0.1;                // p
  double path_loss_exponent = 2.0;        // eta
  double reference_distance_m = 1.0;      // d_0
  double antenna_spacing_wavelengths = 0.5;  // Delta
};

/// Rician fading and local-scattering parameters. kappa is the linear
/// LoS-to-NLoS power ratio; configuration surfaces take it in dB.
struct RicianConfig {
  double kappa_linear = 10.0;
  int n_clusters = 6;                          // N
  double cluster_window_half_width_deg = 40.0; // nominal-angle window
  double angular_std_deg = 5.0;                // sigma_psi
};

/// Raised when a covariance matrix is not positive semi-definite beyond
/// the floating-point clamping tolerance.
struct MatrixConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Friis free-space loss at the reference distance:
/// L_0 = 20 log10(4 pi d_0 / lambda), in dB.
inline double friis_reference_loss_db(const RfConfig& rf) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * rf.reference_distance_m /
                           wavelength(rf.carrier_frequency_hz));
}

/// Log-distance path loss in dB: beta = -L_0 - 10 eta log10(d / d_0).
/// Distances below d_0 are clamped to d_0; the optional counter tallies
/// how often that happened.
inline double path_loss_db(double distance_m, const RfConfig& rf,
                           std::size_t* clamp_count = nullptr) {
  if (distance_m <= 0.0) {
    throw std::domain_error("path_loss_db: distance must be positive");
  }
  double d = distance_m;
  if (d < rf.reference_distance_m) {
    d = rf.reference_distance_m;
    if (clamp_count != nullptr) ++*clamp_count;
  }
  return -friis_reference_loss_db(rf) -
         10.0 * rf.path_loss_exponent * std::log10(d / rf.reference_distance_m);
}

/// Receiver noise power sigma_n^2 = N_0 * B * N_F, in W.
inline double noise_power_w(const RfConfig& rf) {
  return rf.noise_psd_w_per_hz * rf.bandwidth_hz *
         db_to_linear(rf.noise_figure_db);
}

/// Deterministic LoS steering vector of a half-wavelength ULA:
/// element s = sqrt(beta) * exp(-j 2 pi s Delta sin(phi)).
inline Eigen::VectorXcd los_steering(double beta_linear, double azimuth,
                                     int elements, double spacing_wavelengths) {
  if (beta_linear < 0.0) {
    throw std::invalid_argument("los_steering: beta must be non-negative");
  }
  const double amplitude = std::sqrt(beta_linear);
  const double phase_step =
      -2.0 * std::numbers::pi * spacing_wavelengths * std::sin(azimuth);
  Eigen::VectorXcd v(elements);
  for (int s = 0; s < elements; ++s) {
    v(s) = std::polar(amplitude, phase_step * static_cast<double>(s));
  }
  return v;
}

/// Gaussian local scattering NLoS covariance:
///   [R]_{s,m} = (beta/N) sum_n exp[j pi (s-m) sin(psi_n)]
///                          * exp{-(sigma_psi^2/2) [pi (s-m) cos(psi_n)]^2}.
/// The result is symmetrized as (R + R^H)/2 and eigenvalue-clamped at zero
/// so downstream factorizations see an exactly PSD matrix.
inline Eigen::MatrixXcd local_scattering_covariance(
    double beta_linear, const std::vector<double>& nominal_angles,
    double angular_std_rad, int elements) {
  const int n = static_cast<int>(nominal_angles.size());
  if (n < 1) {
    throw std::invalid_argument(
        "local_scattering_covariance: need at least one cluster");
  }
  const double var = angular_std_rad * angular_std_rad;
  Eigen::MatrixXcd r(elements, elements);
  for (int s = 0; s < elements; ++s) {
    for (int m = 0; m < elements; ++m) {
      const double gap = std::numbers::pi * static_cast<double>(s - m);
      std::complex<double> sum = 0.0;
      for (double psi : nominal_angles) {
        const double phase = gap * std::sin(psi);
        const double damp = gap * std::cos(psi);
        sum += std::polar(std::exp(-0.5 * var * damp * damp), phase);
      }
      r(s, m) = beta_linear / static_cast<double>(n) * sum;
    }
  }
  r = 0.5 * (r + r.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
  Eigen::VectorXd eigs = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * eigs.asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Nominal cluster angles of arrival, uniform on
/// [azimuth - half_width, azimuth + half_width].
inline std::vector<double> draw_nominal_angles(double azimuth,
                                               const RicianConfig& rician,
                                               Rng& rng) {
  const double half_width =
      rician.cluster_window_half_width_deg * std::numbers::pi / 180.0;
  std::vector<double> angles(static_cast<std::size_t>(rician.n_clusters));
  for (double& a : angles) {
    a = rng.uniform(azimuth - half_width, azimuth + half_width);
  }
  return angles;
}

/// Square-root factor F with R = F F^H, via Hermitian eigendecomposition.
/// Small negative eigenvalues from round-off are clamped to zero; values
/// below -tol (relative to the largest eigenvalue) indicate a genuinely
/// indefinite input and raise MatrixConditioningError.
inline Eigen::MatrixXcd covariance_sqrt_factor(
    const Eigen::MatrixXcd& covariance, double relative_tolerance = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(covariance);
  if (es.info() != Eigen::Success) {
    throw MatrixConditioningError(
        "covariance_sqrt_factor: eigendecomposition failed");
  }
  const Eigen::VectorXd& eigs = es.eigenvalues();
  const double scale = std::max(eigs.cwiseAbs().maxCoeff(),
                                std::numeric_limits<double>::min());
  if (eigs.minCoeff() < -relative_tolerance * scale) {
    throw MatrixConditioningError(
        "covariance_sqrt_factor: matrix is not PSD within tolerance");
  }
  return es.eigenvectors() *
         eigs.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

/// Everything about the channel that stays fixed across channel
/// realizations within one network realization: large-scale fading,
/// rotated azimuths, and the NLoS covariance square roots (the cluster
/// nominal angles are drawn once, centered on the rotated azimuths).
struct ChannelStatistics {
  int antennas_per_ap = 0;
  Eigen::MatrixXd beta_linear;  // Q x K
  Eigen::MatrixXd azimuths;     // Q x K
  std::vector<Eigen::MatrixXcd> nlos_factors;  // indexed k * Q + q

  static ChannelStatistics build(const GeometryTable& geometry,
                                 const RicianConfig& rician,
                                 const RfConfig& rf, int antennas_per_ap,
                                 Rng& cluster_rng,
                                 std::size_t* clamp_count = nullptr) {
    const Eigen::Index q_count = geometry.distances.rows();
    const Eigen::Index k_count = geometry.distances.cols();
    const double angular_std_rad =
        rician.angular_std_deg * std::numbers::pi / 180.0;

    ChannelStatistics stats;
    stats.antennas_per_ap = antennas_per_ap;
    stats.beta_linear.resize(q_count, k_count);
    stats.azimuths = geometry.azimuths;
    stats.nlos_factors.resize(static_cast<std::size_t>(q_count * k_count));
    for (Eigen::Index k = 0; k < k_count; ++k) {
      for (Eigen::Index q = 0; q < q_count; ++q) {
        const double beta = db_to_linear(
            path_loss_db(geometry.distances(q, k), rf, clamp_count));
        stats.beta_linear(q, k) = beta;
        const std::vector<double> angles =
            draw_nominal_angles(geometry.azimuths(q, k), rician, cluster_rng);
        stats.nlos_factors[static_cast<std::size_t>(k * q_count + q)] =
            covariance_sqrt_factor(local_scattering_covariance(
                beta, angles, angular_std_rad, antennas_per_ap));
      }
    }
    return stats;
  }
};

/// One draw of the collective M x K channel matrix (Eq. form
/// h = sqrt(kappa/(1+kappa)) h_los + sqrt(1/(1+kappa)) F z with
/// z ~ CN(0, I)). Column k stacks the per-AP blocks AP-major. NLoS draws
/// are consumed even when their weight is zero so that paired streams
/// stay aligned across sweep points.
inline Eigen::MatrixXcd sample_channel(const ChannelStatistics& stats,
                                       const RicianConfig& rician,
                                       const RfConfig& rf, Rng& rng) {
  const Eigen::Index q_count = stats.beta_linear.rows();
  const Eigen::Index k_count = stats.beta_linear.cols();
  const int s = stats.antennas_per_ap;
  const double kappa = rician.kappa_linear;
  const bool los_only = std::isinf(kappa);
  const double los_weight = los_only ? 1.0 : std::sqrt(kappa / (1.0 + kappa));
  const double nlos_weight = los_only ? 0.0 : std::sqrt(1.0 / (1.0 + kappa));

  Eigen::MatrixXcd h(q_count * s, k_count);
  Eigen::VectorXcd z(s);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    for (Eigen::Index q = 0; q < q_count; ++q) {
      for (int i = 0; i < s; ++i) z(i) = rng.cnormal();
      const Eigen::MatrixXcd& factor =
          stats.nlos_factors[static_cast<std::size_t>(k * q_count + q)];
      h.col(k).segment(q * s, s) =
          los_weight * los_steering(stats.beta_linear(q, k),
                                    stats.azimuths(q, k), s,
                                    rf.antenna_spacing_wavelengths) +
          nlos_weight * (factor * z);
    }
  }
  return h;
}

/// Channel-estimate error variance per entry, sigma_csi^2 = 1/(K rho)
/// with transmit SNR rho = p / sigma_n^2.
inline double csi_error_variance(const RfConfig& rf, int k_active) {
  if (k_active < 1) {
    throw std::invalid_argument("csi_error_variance: K must be >= 1");
  }
  return noise_power_w(rf) / (static_cast<double>(k_active) * rf.tx_power_w);
}

/// Least-squares estimation error model: h_hat = h + e with e i.i.d.
/// CN(0, sigma_csi^2), independent of the true channel.
inline Eigen::MatrixXcd perturb_csi(const Eigen::MatrixXcd& true_channels,
                                    const RfConfig& rf, int k_active,
                                    Rng& rng) {
  const double sigma = std::sqrt(csi_error_variance(rf, k_active));
  Eigen::MatrixXcd estimated = true_channels;
  for (Eigen::Index k = 0; k < estimated.cols(); ++k) {
    for (Eigen::Index m = 0; m < estimated.rows(); ++m) {
      estimated(m, k) += sigma * rng.cnormal();
    }
  }
  return estimated;
}

}  // namespace rulasim
