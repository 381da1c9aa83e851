#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rulasim/channel.hpp"
#include "rulasim/geometry.hpp"
#include "rulasim/objective.hpp"
#include "rulasim/positioning.hpp"
#include "rulasim/pso.hpp"
#include "rulasim/receiver.hpp"
#include "rulasim/rng.hpp"

namespace rulasim {

enum class ArrayMode { static_ula, rotary_ula };

inline const char* to_string(ArrayMode mode) {
  return mode == ArrayMode::static_ula ? "static_ula" : "rotary_ula";
}

/// Static world description for one simulated configuration.
struct Scenario {
  double area_side_m = 50.0;  // l
  ApDeployment deployment;
  int antennas_per_ap = 16;  // S
  int k_active = 10;         // K
  double device_height_m = 1.5;
  RfConfig rf;
  RicianConfig rician;
  PositioningModel positioning;
  ArrayMode mode = ArrayMode::static_ula;
  double zf_condition_cap = 1e8;
  std::optional<PsoConfig> pso;  // unset -> defaults over [0, pi]^Q

  int num_aps() const { return static_cast<int>(deployment.num_aps()); }
  int total_antennas() const { return num_aps() * antennas_per_ap; }
};

struct FarFieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a channel-realization slot keeps drawing ill-conditioned
/// estimates past the retry cap.
struct RealizationFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Substream ids per network realization. Static and rotary modes consume
// identical position/error/cluster/channel streams; only rotary touches
// the PSO stream, so paired comparisons share their random numbers.
namespace stream {
inline constexpr std::uint64_t kPositions = 0;
inline constexpr std::uint64_t kPositioningError = 1;
inline constexpr std::uint64_t kPso = 2;
inline constexpr std::uint64_t kClusters = 3;
inline constexpr std::uint64_t kChannel = 4;
}  // namespace stream

inline std::vector<Position2D> draw_device_positions(double area_side_m,
                                                     int k_active, Rng& rng) {
  std::vector<Position2D> positions(static_cast<std::size_t>(k_active));
  for (Position2D& p : positions) {
    p.x = rng.uniform(0.0, area_side_m);
    p.y = rng.uniform(0.0, area_side_m);
  }
  return positions;
}

struct RealizationOutcome {
  Eigen::VectorXd per_user_se;  // Eq. 12 means across channel realizations
  long excluded = 0;
  std::size_t path_loss_clamps = 0;
  std::vector<double> rotations;
};

inline void validate_scenario(const Scenario& scenario) {
  if (scenario.k_active < 1) {
    throw std::invalid_argument("scenario: K must be >= 1");
  }
  if (scenario.num_aps() < 1) {
    throw std::invalid_argument("scenario: deployment needs at least one AP");
  }
  if (scenario.k_active > scenario.total_antennas()) {
    throw std::invalid_argument(
        "scenario: ZF needs K <= Q*S (K=" + std::to_string(scenario.k_active) +
        ", Q*S=" + std::to_string(scenario.total_antennas()) + ")");
  }
  if (!far_field_ok(scenario.deployment, scenario.device_height_m,
                    static_cast<std::size_t>(scenario.antennas_per_ap),
                    scenario.rf.carrier_frequency_hz)) {
    throw FarFieldError(
        "far-field violated: |h_AP - h_MTD| < Fraunhofer distance for S=" +
        std::to_string(scenario.antennas_per_ap));
  }
}

/// One network realization: draw device positions and their estimates,
/// optimize the array rotations from the estimates (rotary mode only),
/// then average the per-user SE over n_channel independent channel + CSI
/// error draws. ZF is built from the CSI estimates; SINR is evaluated on
/// the true channels. Ill-conditioned estimate draws are excluded and
/// replaced by fresh draws, up to 10 retries per slot.
inline RealizationOutcome run_network_realization(
    const Scenario& scenario, std::uint64_t master_seed,
    std::uint64_t realization_index, int n_channel) {
  if (n_channel < 1) {
    throw std::invalid_argument("run_network_realization: n_channel >= 1");
  }
  const int k_active = scenario.k_active;
  const int q_count = scenario.num_aps();

  Rng position_rng =
      Rng::derive(master_seed, realization_index, stream::kPositions);
  Rng error_rng =
      Rng::derive(master_seed, realization_index, stream::kPositioningError);
  Rng pso_rng = Rng::derive(master_seed, realization_index, stream::kPso);
  Rng cluster_rng =
      Rng::derive(master_seed, realization_index, stream::kClusters);
  Rng channel_rng =
      Rng::derive(master_seed, realization_index, stream::kChannel);

  const std::vector<Position2D> true_positions =
      draw_device_positions(scenario.area_side_m, k_active, position_rng);
  std::vector<Position2D> estimated_positions(true_positions.size());
  for (std::size_t k = 0; k < true_positions.size(); ++k) {
    estimated_positions[k] = sample_position_estimate(
        true_positions[k], scenario.positioning, error_rng);
  }

  RealizationOutcome outcome;
  outcome.rotations.assign(static_cast<std::size_t>(q_count), 0.0);
  if (scenario.mode == ArrayMode::rotary_ula) {
    PsoConfig pso_config = scenario.pso.has_value()
                               ? *scenario.pso
                               : PsoConfig::defaults(q_count, 0.0,
                                                     std::numbers::pi);
    const auto objective = [&](const std::vector<double>& thetas) {
      return score_rotations(thetas, estimated_positions, scenario.deployment,
                             scenario.device_height_m, scenario.rf,
                             scenario.antennas_per_ap,
                             scenario.zf_condition_cap);
    };
    outcome.rotations = pso_maximize(objective, pso_config, pso_rng).position;
  }

  const GeometryTable geometry =
      compute_geometry(scenario.deployment, true_positions,
                       scenario.device_height_m, outcome.rotations);
  const ChannelStatistics stats = ChannelStatistics::build(
      geometry, scenario.rician, scenario.rf, scenario.antennas_per_ap,
      cluster_rng, &outcome.path_loss_clamps);

  const double tx_power = scenario.rf.tx_power_w;
  const double noise = noise_power_w(scenario.rf);
  constexpr int kMaxRetriesPerSlot = 10;

  Eigen::VectorXd se_sums = Eigen::VectorXd::Zero(k_active);
  for (int slot = 0; slot < n_channel; ++slot) {
    int retries = 0;
    for (;;) {
      const Eigen::MatrixXcd true_channels =
          sample_channel(stats, scenario.rician, scenario.rf, channel_rng);
      const Eigen::MatrixXcd estimated_channels =
          perturb_csi(true_channels, scenario.rf, k_active, channel_rng);
      Eigen::MatrixXcd combiner;
      try {
        combiner = zf_combiner(estimated_channels, scenario.zf_condition_cap);
      } catch (const SingularChannelError&) {
        ++outcome.excluded;
        if (++retries > kMaxRetriesPerSlot) {
          throw RealizationFailureError(
              "channel slot " + std::to_string(slot) + " of realization " +
              std::to_string(realization_index) + " exceeded " +
              std::to_string(kMaxRetriesPerSlot) +
              " ill-conditioned redraws (Q=" + std::to_string(q_count) +
              ", S=" + std::to_string(scenario.antennas_per_ap) +
              ", K=" + std::to_string(k_active) + ")");
        }
        continue;
      }
      se_sums += compute_sinr(true_channels, combiner, tx_power, noise).se;
      break;
    }
  }
  outcome.per_user_se = se_sums / static_cast<double>(n_channel);
  return outcome;
}

/// One output row of a sweep: a label for the swept value plus the fully
/// resolved scenario to simulate.
struct SweepCell {
  std::string sweep_label;
  Scenario scenario;
};

struct SweepResult {
  std::string sweep_label;
  ArrayMode mode = ArrayMode::static_ula;
  int num_aps = 0;
  int antennas_per_ap = 0;
  double mean_se = 0.0;    // bit/s/Hz, Eq. 12 then Eq. 13 then network mean
  double std_error = 0.0;  // over network realizations
  int n_network = 0;
  int n_channel = 0;
  long excluded = 0;
  std::uint64_t seed = 0;
};

/// Evaluates every cell over the same n_network realization indices with
/// common random numbers: realization i uses streams derived from
/// (master_seed, i) in every cell, so modes and sweep points are paired.
/// The reduction is ordered by realization index, which makes the output
/// independent of the worker count.
inline std::vector<SweepResult> run_sweep(const std::vector<SweepCell>& cells,
                                          int n_network, int n_channel,
                                          std::uint64_t master_seed,
                                          int workers = 1) {
  if (n_network < 1) {
    throw std::invalid_argument("run_sweep: n_network must be >= 1");
  }
  for (const SweepCell& cell : cells) validate_scenario(cell.scenario);

  const std::size_t n_cells = cells.size();
  const std::size_t n_tasks = n_cells * static_cast<std::size_t>(n_network);
  std::vector<double> se(n_tasks, 0.0);
  std::vector<long> excluded(n_tasks, 0);
  std::vector<std::exception_ptr> errors(n_tasks);

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t task = next.fetch_add(1); task < n_tasks;
         task = next.fetch_add(1)) {
      const std::size_t cell = task / static_cast<std::size_t>(n_network);
      const std::uint64_t index = task % static_cast<std::size_t>(n_network);
      try {
        const RealizationOutcome outcome = run_network_realization(
            cells[cell].scenario, master_seed, index, n_channel);
        se[task] = outcome.per_user_se.mean();
        excluded[task] = outcome.excluded;
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };

  const int thread_count = std::max(
      1, std::min<int>(workers, static_cast<int>(n_tasks)));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  std::vector<SweepResult> results;
  results.reserve(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const double* cell_se = se.data() + cell * static_cast<std::size_t>(n_network);
    double mean = 0.0;
    for (int i = 0; i < n_network; ++i) mean += cell_se[i];
    mean /= static_cast<double>(n_network);
    double std_error = 0.0;
    if (n_network > 1) {
      double ss = 0.0;
      for (int i = 0; i < n_network; ++i) {
        const double d = cell_se[i] - mean;
        ss += d * d;
      }
      std_error = std::sqrt(ss / static_cast<double>(n_network - 1)) /
                  std::sqrt(static_cast<double>(n_network));
    }
    long total_excluded = 0;
    for (int i = 0; i < n_network; ++i) {
      total_excluded += excluded[cell * static_cast<std::size_t>(n_network) +
                                 static_cast<std::size_t>(i)];
    }
    const Scenario& scenario = cells[cell].scenario;
    results.push_back({cells[cell].sweep_label, scenario.mode,
                       scenario.num_aps(), scenario.antennas_per_ap, mean,
                       std_error, n_network, n_channel, total_excluded,
                       master_seed});
  }
  return results;
}

}  // namespace rulasim
