#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "rulasim/channel.hpp"
#include "rulasim/geometry.hpp"
#include "rulasim/receiver.hpp"

namespace rulasim {

/// Full-LoS pseudo channel matrix built from estimated device positions
/// and a candidate rotation vector: estimated geometry feeds the known
/// path-loss model and LoS steering vectors; no fading and no CSI error
/// enter here. Column k stacks the per-AP blocks AP-major, like the true
/// channel matrix.
inline Eigen::MatrixXcd build_pseudo_channels(
    const std::vector<Position2D>& estimated_positions,
    const ApDeployment& deployment, const std::vector<double>& rotations,
    double device_height_m, const RfConfig& rf, int antennas_per_ap) {
  const GeometryTable geometry = compute_geometry(
      deployment, estimated_positions, device_height_m, rotations);
  const Eigen::Index q_count = geometry.distances.rows();
  const Eigen::Index k_count = geometry.distances.cols();
  const int s = antennas_per_ap;

  Eigen::MatrixXcd pseudo(q_count * s, k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    for (Eigen::Index q = 0; q < q_count; ++q) {
      const double beta = db_to_linear(path_loss_db(geometry.distances(q, k), rf));
      pseudo.col(k).segment(q * s, s) = los_steering(
          beta, geometry.azimuths(q, k), s, rf.antenna_spacing_wavelengths);
    }
  }
  return pseudo;
}

/// Location-based beamforming objective: the mean per-user achievable SE
/// obtained when the pseudo channels play both the estimated and the true
/// channel role in the ZF receiver. Deterministic in its inputs; a
/// singular pseudo-channel matrix scores -infinity so optimizers treat it
/// as worst.
inline double score_rotations(const std::vector<double>& rotations,
                              const std::vector<Position2D>& estimated_positions,
                              const ApDeployment& deployment,
                              double device_height_m, const RfConfig& rf,
                              int antennas_per_ap,
                              double condition_cap = 1e8) {
  const Eigen::MatrixXcd pseudo =
      build_pseudo_channels(estimated_positions, deployment, rotations,
                            device_height_m, rf, antennas_per_ap);
  Eigen::MatrixXcd combiner;
  try {
    combiner = zf_combiner(pseudo, condition_cap);
  } catch (const SingularChannelError&) {
    return -std::numeric_limits<double>::infinity();
  }
  const SinrReport report =
      compute_sinr(pseudo, combiner, rf.tx_power_w, noise_power_w(rf));
  return report.se.mean();
}

}  // namespace rulasim
