#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rulasim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

inline double wavelength(double carrier_frequency_hz) {
  return kSpeedOfLight / carrier_frequency_hz;
}

/// Ground-plane coordinates in meters. Devices live inside the square
/// coverage area; error-perturbed position estimates may fall outside it
/// and are still valid inputs everywhere downstream.
struct Position2D {
  double x = 0.0;
  double y = 0.0;
};

/// Access-point placement: positions on the ground plane, common mast
/// height, and the baseline boresight orientation of each ULA before any
/// rotation is applied.
struct ApDeployment {
  std::vector<Position2D> ap_positions;
  double ap_height_m = 0.0;
  std::vector<double> boresight_orientations;  // radians, one per AP

  std::size_t num_aps() const { return ap_positions.size(); }
};

/// Per-(AP, device) 3D distances and boresight-relative azimuths.
struct GeometryTable {
  Eigen::MatrixXd distances;  // Q x K, meters
  Eigen::MatrixXd azimuths;   // Q x K, radians in (-pi, pi]
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

/// Symmetric grid layouts for Q in {1, 2, 4, 8}; all boresights along the
/// x-axis. Other AP counts need an explicit deployment.
inline ApDeployment standard_layout(std::size_t num_aps, double area_side_m) {
  if (area_side_m <= 0.0) {
    throw std::invalid_argument("standard_layout: area side must be positive");
  }
  const double l = area_side_m;
  ApDeployment d;
  switch (num_aps) {
    case 1:
      d.ap_positions = {{l / 2, l / 2}};
      break;
    case 2:
      d.ap_positions = {{l / 4, l / 2}, {3 * l / 4, l / 2}};
      break;
    case 4:
      d.ap_positions = {{l / 4, l / 4},
                        {l / 4, 3 * l / 4},
                        {3 * l / 4, l / 4},
                        {3 * l / 4, 3 * l / 4}};
      break;
    case 8:
      d.ap_positions = {{l / 4, l / 4},     {l / 4, 3 * l / 4},
                        {3 * l / 4, l / 4}, {3 * l / 4, 3 * l / 4},
                        {l / 2, l / 4},     {l / 2, 3 * l / 4},
                        {l / 4, l / 2},     {3 * l / 4, l / 2}};
      break;
    default:
      throw std::invalid_argument("no standard layout for Q=" +
                                  std::to_string(num_aps));
  }
  d.boresight_orientations.assign(num_aps, 0.0);
  return d;
}

/// 3D distances and rotated azimuths for every (AP, device) pair. The
/// azimuth convention is relative to the rotated boresight:
///   phi' = wrap(atan2(dy, dx) - boresight_q - theta_q),
/// so a zero rotation vector reproduces the static-ULA geometry and
/// rotating the array by theta shifts the relative angle by -theta.
/// Distances do not depend on the rotations.
inline GeometryTable compute_geometry(const ApDeployment& deployment,
                                      const std::vector<Position2D>& devices,
                                      double device_height_m,
                                      const std::vector<double>& rotations) {
  const std::size_t q_count = deployment.num_aps();
  const std::size_t k_count = devices.size();
  if (rotations.size() != q_count) {
    throw std::invalid_argument("compute_geometry: rotation vector length " +
                                std::to_string(rotations.size()) +
                                " does not match AP count " +
                                std::to_string(q_count));
  }
  for (double theta : rotations) {
    if (!std::isfinite(theta)) {
      throw std::invalid_argument("compute_geometry: non-finite rotation");
    }
  }
  const double dh = deployment.ap_height_m - device_height_m;

  GeometryTable table;
  table.distances.resize(q_count, k_count);
  table.azimuths.resize(q_count, k_count);
  for (std::size_t q = 0; q < q_count; ++q) {
    const Position2D ap = deployment.ap_positions[q];
    const double offset = deployment.boresight_orientations[q] + rotations[q];
    for (std::size_t k = 0; k < k_count; ++k) {
      const double dx = devices[k].x - ap.x;
      const double dy = devices[k].y - ap.y;
      const double dist = std::sqrt(dx * dx + dy * dy + dh * dh);
      if (dist == 0.0) {
        throw std::domain_error(
            "compute_geometry: device coincides with AP ground projection at "
            "equal height (zero distance)");
      }
      table.distances(q, k) = dist;
      table.azimuths(q, k) = wrap_angle(std::atan2(dy, dx) - offset);
    }
  }
  return table;
}

/// Near-field/far-field boundary of a half-wavelength ULA:
/// d_F = 2 D^2 / lambda with aperture D = (S-1) lambda / 2, which reduces
/// to (S-1)^2 lambda / 2.
inline double fraunhofer_distance(std::size_t elements,
                                  double carrier_frequency_hz) {
  if (elements < 2) {
    throw std::invalid_argument(
        "fraunhofer_distance: array needs at least 2 elements");
  }
  if (carrier_frequency_hz <= 0.0) {
    throw std::invalid_argument(
        "fraunhofer_distance: carrier frequency must be positive");
  }
  const double s = static_cast<double>(elements);
  return (s - 1.0) * (s - 1.0) * wavelength(carrier_frequency_hz) / 2.0;
}

/// True iff the AP/device height difference alone guarantees far-field
/// conditions; that difference lower-bounds every AP-device distance.
inline bool far_field_ok(const ApDeployment& deployment,
                         double device_height_m, std::size_t elements,
                         double carrier_frequency_hz) {
  const double min_distance =
      std::abs(deployment.ap_height_m - device_height_m);
  return min_distance >= fraunhofer_distance(elements, carrier_frequency_hz);
}

}  // namespace rulasim
