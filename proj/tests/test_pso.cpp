#include "rulasim/pso.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "rulasim/rng.hpp"

namespace rulasim {
namespace {

TEST(PsoConfig, TableDefaults) {
  const PsoConfig q1 = PsoConfig::defaults(1, 0.0, std::numbers::pi);
  EXPECT_EQ(q1.effective_swarm_size(), 10);
  EXPECT_EQ(q1.effective_max_iters(), 200);
  const PsoConfig q8 = PsoConfig::defaults(8, 0.0, std::numbers::pi);
  EXPECT_EQ(q8.effective_swarm_size(), 80);
  EXPECT_EQ(q8.effective_max_iters(), 1600);
  const PsoConfig q20 = PsoConfig::defaults(20, 0.0, 1.0);
  EXPECT_EQ(q20.effective_swarm_size(), 100);
  EXPECT_DOUBLE_EQ(q1.cognitive_coeff, 1.49);
  EXPECT_DOUBLE_EQ(q1.social_coeff, 1.49);
  EXPECT_DOUBLE_EQ(q1.inertia_max, 1.1);
  EXPECT_DOUBLE_EQ(q1.inertia_min, 0.1);
  EXPECT_EQ(q1.max_stall_iters, 20);
  EXPECT_DOUBLE_EQ(q1.tolerance, 1e-6);
}

TEST(PsoConfig, RejectsBadBounds) {
  PsoConfig config = PsoConfig::defaults(2, 0.0, 1.0);
  config.upper[1] = -1.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

TEST(PsoMaximize, FindsSphereOptimum) {
  const auto objective = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s -= (v - 0.5) * (v - 0.5);
    return s;
  };
  Rng rng(1);
  const PsoResult result =
      pso_maximize(objective, PsoConfig::defaults(2, 0.0, 1.0), rng);
  EXPECT_NEAR(result.position[0], 0.5, 1e-3);
  EXPECT_NEAR(result.position[1], 0.5, 1e-3);
}

TEST(PsoMaximize, FindsSineOptimum) {
  const auto objective = [](const std::vector<double>& x) {
    return std::sin(x[0]);
  };
  Rng rng(2);
  const PsoResult result =
      pso_maximize(objective, PsoConfig::defaults(1, 0.0, std::numbers::pi), rng);
  EXPECT_NEAR(result.position[0], std::numbers::pi / 2.0, 1e-3);
  EXPECT_NEAR(result.score, 1.0, 1e-6);
}

TEST(PsoMaximize, ConstantObjectiveStallsQuickly) {
  const auto objective = [](const std::vector<double>&) { return 3.0; };
  Rng rng(3);
  const PsoConfig config = PsoConfig::defaults(2, -1.0, 1.0);
  const PsoResult result = pso_maximize(objective, config, rng);
  EXPECT_EQ(result.reason, PsoTermination::stall);
  EXPECT_LE(result.iterations, config.max_stall_iters + 1);
  EXPECT_DOUBLE_EQ(result.score, 3.0);
}

TEST(PsoMaximize, NanScoresAreTreatedAsWorst) {
  const auto objective = [](const std::vector<double>& x) {
    if (x[0] > 0.5) return std::numeric_limits<double>::quiet_NaN();
    return x[0];
  };
  Rng rng(4);
  const PsoResult result =
      pso_maximize(objective, PsoConfig::defaults(1, 0.0, 1.0), rng);
  EXPECT_LE(result.position[0], 0.5);
  EXPECT_NEAR(result.score, 0.5, 1e-3);
}

TEST(PsoMaximize, ReproducibleTrajectories) {
  const auto objective = [](const std::vector<double>& x) {
    return -std::abs(std::sin(5.0 * x[0]) + 0.3 * x[0]);
  };
  const PsoConfig config = PsoConfig::defaults(1, 0.0, 3.0);
  Rng rng_a(42);
  Rng rng_b(42);
  const PsoResult a = pso_maximize(objective, config, rng_a);
  const PsoResult b = pso_maximize(objective, config, rng_b);
  EXPECT_EQ(a.position[0], b.position[0]);
  EXPECT_EQ(a.score, b.score);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(PsoStep, BestsNeverWorsenAndStayInBounds) {
  const auto objective = [](const std::vector<double>& x) {
    return std::cos(3.0 * x[0]) * std::sin(2.0 * x[1]);
  };
  const PsoConfig config = PsoConfig::defaults(2, -2.0, 2.0);
  Rng rng(7);
  SwarmState state = pso_init(objective, config, rng);
  double best = state.global_best_score;
  for (int iter = 0; iter < 50; ++iter) {
    pso_step(state, objective, config, rng);
    EXPECT_GE(state.global_best_score, best);
    best = state.global_best_score;
    EXPECT_GE(state.positions.minCoeff(), -2.0);
    EXPECT_LE(state.positions.maxCoeff(), 2.0);
    EXPECT_DOUBLE_EQ(state.global_best_score,
                     state.personal_best_scores.maxCoeff());
  }
}

TEST(PsoStep, ParticleAtGlobalBestWithZeroVelocityStaysPut) {
  const auto objective = [](const std::vector<double>& x) { return -x[0] * x[0]; };
  PsoConfig config = PsoConfig::defaults(1, -1.0, 1.0);
  config.swarm_size = 2;
  Rng rng(8);
  SwarmState state = pso_init(objective, config, rng);
  // Pin particle 0 at the global best with zero velocity; it has no pull.
  state.positions(0, 0) = state.global_best_position(0);
  state.personal_best_positions(0, 0) = state.global_best_position(0);
  state.personal_best_scores(0) = state.global_best_score;
  state.velocities(0, 0) = 0.0;
  const double before = state.positions(0, 0);
  pso_step(state, objective, config, rng);
  EXPECT_DOUBLE_EQ(state.positions(0, 0), before);
}

TEST(PsoStep, BallisticMotionWithoutAttraction) {
  const auto objective = [](const std::vector<double>&) { return 0.0; };
  PsoConfig config = PsoConfig::defaults(1, -100.0, 100.0);
  config.cognitive_coeff = 1e-300;  // validate() requires > 0
  config.social_coeff = 1e-300;
  config.inertia_max = 1.0;
  config.inertia_min = 1.0;
  config.swarm_size = 3;
  Rng rng(9);
  SwarmState state = pso_init(objective, config, rng);
  state.velocities.setConstant(0.25);
  const Eigen::MatrixXd start = state.positions;
  pso_step(state, objective, config, rng);
  pso_step(state, objective, config, rng);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(state.positions(i, 0), start(i, 0) + 0.5, 1e-12);
  }
}

}  // namespace
}  // namespace rulasim
