#pragma once

#include <cmath>
#include <stdexcept>

#include "rulasim/geometry.hpp"
#include "rulasim/rng.hpp"

namespace rulasim {

/// Bivariate Gaussian positioning error: both axes are independent
/// N(0, sigma_e_sq), so the error magnitude is Rayleigh(sigma_e) and the
/// error angle is uniform. sigma_e_sq = 0 means perfect positioning.
struct PositioningModel {
  double sigma_e_sq = 0.0;  // m^2 per axis
};

/// Position estimate = true position + Gaussian error. Estimates are not
/// clipped to the coverage area; clipping would bias the error law.
inline Position2D sample_position_estimate(const Position2D& true_position,
                                           const PositioningModel& model,
                                           Rng& rng) {
  const double sigma = std::sqrt(model.sigma_e_sq);
  const double ex = sigma * rng.normal();
  const double ey = sigma * rng.normal();
  return {true_position.x + ex, true_position.y + ey};
}

/// F-quantile of a Rayleigh distribution with scale sigma_e:
/// Q(F) = sigma_e * sqrt(-2 ln(1 - F)).
inline double rayleigh_quantile(double f, double sigma_e) {
  if (f < 0.0 || f >= 1.0) {
    throw std::domain_error("rayleigh_quantile: F must be in [0, 1)");
  }
  return sigma_e * std::sqrt(-2.0 * std::log1p(-f));
}

/// Error variance whose Rayleigh F-quantile equals the target accuracy:
/// sigma_e_sq = target^2 / (-2 ln(1 - F)). Inverse of rayleigh_quantile.
inline double sigma_sq_for_quantile(double target_m, double f) {
  if (target_m <= 0.0) {
    throw std::domain_error("sigma_sq_for_quantile: target must be positive");
  }
  if (f <= 0.0 || f >= 1.0) {
    throw std::domain_error("sigma_sq_for_quantile: F must be in (0, 1)");
  }
  return target_m * target_m / (-2.0 * std::log1p(-f));
}

/// dB convention for error variances: value_dB = 10 log10(sigma_e_sq / 1 m^2).
inline double sigma_sq_from_db(double db) { return std::pow(10.0, db / 10.0); }
inline double sigma_sq_to_db(double sigma_e_sq) {
  return 10.0 * std::log10(sigma_e_sq);
}

}  // namespace rulasim
