#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rulasim/rng.hpp"

namespace rulasim {

/// Box-bounded global-best particle swarm parameters. Zero swarm_size or
/// max_iters selects the size rules min{100, 10 n_vars} and 200 n_vars.
struct PsoConfig {
  int n_vars = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  double inertia_max = 1.1;
  double inertia_min = 0.1;
  double cognitive_coeff = 1.49;  // c1
  double social_coeff = 1.49;     // c2
  int swarm_size = 0;
  int max_iters = 0;
  int max_stall_iters = 20;
  double tolerance = 1e-6;

  static PsoConfig defaults(int n_vars, double lo, double hi) {
    PsoConfig config;
    config.n_vars = n_vars;
    config.lower.assign(static_cast<std::size_t>(n_vars), lo);
    config.upper.assign(static_cast<std::size_t>(n_vars), hi);
    return config;
  }

  int effective_swarm_size() const {
    return swarm_size > 0 ? swarm_size : std::min(100, 10 * n_vars);
  }
  int effective_max_iters() const {
    return max_iters > 0 ? max_iters : 200 * n_vars;
  }

  void validate() const {
    if (n_vars < 1) throw std::invalid_argument("pso: n_vars must be >= 1");
    if (lower.size() != static_cast<std::size_t>(n_vars) ||
        upper.size() != static_cast<std::size_t>(n_vars)) {
      throw std::invalid_argument("pso: bounds must have n_vars entries");
    }
    for (int d = 0; d < n_vars; ++d) {
      if (!(lower[d] < upper[d]) || !std::isfinite(lower[d]) ||
          !std::isfinite(upper[d])) {
        throw std::invalid_argument("pso: bounds must be finite with lo < hi");
      }
    }
    if (effective_swarm_size() < 2) {
      throw std::invalid_argument("pso: swarm size must be >= 2");
    }
    if (cognitive_coeff <= 0.0 || social_coeff <= 0.0) {
      throw std::invalid_argument("pso: acceleration coefficients must be > 0");
    }
  }
};

enum class PsoTermination { max_iters, stall };

struct PsoResult {
  std::vector<double> position;
  double score = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  PsoTermination reason = PsoTermination::max_iters;
};

/// Swarm state between steps. Rows index particles, columns dimensions.
/// best_history[t] is the global best after t steps (entry 0 is the
/// initialization value).
struct SwarmState {
  Eigen::MatrixXd positions;
  Eigen::MatrixXd velocities;
  Eigen::MatrixXd personal_best_positions;
  Eigen::VectorXd personal_best_scores;
  Eigen::RowVectorXd global_best_position;
  double global_best_score = -std::numeric_limits<double>::infinity();
  std::vector<double> best_history;
  double inertia = 1.1;
  int iteration = 0;
  int stall_counter = 0;  // non-improving streak, drives the inertia
};

namespace detail {
inline double sanitize_score(double score) {
  return std::isnan(score) ? -std::numeric_limits<double>::infinity() : score;
}
}  // namespace detail

/// Uniformly seeds the swarm over the box, evaluates it, and initializes
/// personal bests to the starting positions. Initial velocities are zero.
template <class Objective>
SwarmState pso_init(Objective&& objective, const PsoConfig& config, Rng& rng) {
  config.validate();
  const int swarm = config.effective_swarm_size();
  const int n = config.n_vars;

  SwarmState state;
  state.positions.resize(swarm, n);
  for (int i = 0; i < swarm; ++i) {
    for (int d = 0; d < n; ++d) {
      state.positions(i, d) = rng.uniform(config.lower[d], config.upper[d]);
    }
  }
  state.velocities = Eigen::MatrixXd::Zero(swarm, n);
  state.personal_best_positions = state.positions;
  state.personal_best_scores.resize(swarm);

  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < swarm; ++i) {
    Eigen::Map<Eigen::RowVectorXd>(x.data(), n) = state.positions.row(i);
    state.personal_best_scores(i) = detail::sanitize_score(objective(x));
  }
  Eigen::Index best;
  state.global_best_score = state.personal_best_scores.maxCoeff(&best);
  state.global_best_position = state.positions.row(best);
  state.best_history.push_back(state.global_best_score);
  state.inertia = config.inertia_max;
  return state;
}

/// One iteration: velocity update with fresh per-particle, per-dimension
/// uniforms, ballistic move, boundary clamping (the offending velocity
/// component is zeroed), then evaluation and best updates. The inertia
/// weight adapts within [inertia_min, inertia_max]: it doubles while the
/// swarm keeps improving the global best and halves once the
/// non-improving streak exceeds five iterations.
template <class Objective>
void pso_step(SwarmState& state, Objective&& objective, const PsoConfig& config,
              Rng& rng) {
  const int swarm = static_cast<int>(state.positions.rows());
  const int n = config.n_vars;
  const double inertia = state.inertia;

  for (int i = 0; i < swarm; ++i) {
    for (int d = 0; d < n; ++d) {
      const double u1 = rng.uniform();
      const double u2 = rng.uniform();
      double v = inertia * state.velocities(i, d) +
                 config.cognitive_coeff * u1 *
                     (state.personal_best_positions(i, d) - state.positions(i, d)) +
                 config.social_coeff * u2 *
                     (state.global_best_position(d) - state.positions(i, d));
      double x = state.positions(i, d) + v;
      if (x < config.lower[d]) {
        x = config.lower[d];
        v = 0.0;
      } else if (x > config.upper[d]) {
        x = config.upper[d];
        v = 0.0;
      }
      state.velocities(i, d) = v;
      state.positions(i, d) = x;
    }
  }

  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < swarm; ++i) {
    Eigen::Map<Eigen::RowVectorXd>(x.data(), n) = state.positions.row(i);
    const double score = detail::sanitize_score(objective(x));
    if (score > state.personal_best_scores(i)) {
      state.personal_best_scores(i) = score;
      state.personal_best_positions.row(i) = state.positions.row(i);
      if (score > state.global_best_score) {
        state.global_best_score = score;
        state.global_best_position = state.positions.row(i);
      }
    }
  }

  const bool improved = state.global_best_score > state.best_history.back();
  state.stall_counter = improved ? std::max(0, state.stall_counter - 1)
                                 : state.stall_counter + 1;
  if (state.stall_counter < 2) {
    state.inertia *= 2.0;
  } else if (state.stall_counter > 5) {
    state.inertia *= 0.5;
  }
  state.inertia =
      std::clamp(state.inertia, config.inertia_min, config.inertia_max);
  state.best_history.push_back(state.global_best_score);
  ++state.iteration;
}

/// Runs the swarm until the relative change of the global best over the
/// trailing max_stall_iters iterations falls below tolerance, or the
/// iteration budget is exhausted. Returns the best position ever
/// evaluated; the global-best trajectory is nondecreasing.
template <class Objective>
PsoResult pso_maximize(Objective&& objective, const PsoConfig& config,
                       Rng& rng) {
  SwarmState state = pso_init(objective, config, rng);
  const int max_iters = config.effective_max_iters();
  const int window = config.max_stall_iters;

  PsoResult result;
  result.reason = PsoTermination::max_iters;
  while (state.iteration < max_iters) {
    pso_step(state, objective, config, rng);
    if (state.iteration < window) continue;
    const double windowed_change =
        state.global_best_score -
        state.best_history[static_cast<std::size_t>(state.iteration - window)];
    const double scale = std::max(std::abs(state.global_best_score), 1e-12);
    if (std::isfinite(state.global_best_score) &&
        windowed_change < config.tolerance * scale) {
      result.reason = PsoTermination::stall;
      break;
    }
  }

  result.position.assign(state.global_best_position.data(),
                         state.global_best_position.data() + config.n_vars);
  result.score = state.global_best_score;
  result.iterations = state.iteration;
  return result;
}

}  // namespace rulasim
