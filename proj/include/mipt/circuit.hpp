#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mipt/curve.hpp"
#include "mipt/gates.hpp"
#include "mipt/qstate.hpp"
#include "mipt/rng.hpp"

namespace mipt {

struct CircuitConfig {
  int L = 0;
  CartanCoeffs cartan;
  double p = 0.0;
  int t_steps = 0;  ///< 0 means the default 2L
  std::uint64_t seed = 0;
  bool record_timeseries = false;
  int max_qubits = kDefaultMaxQubits;

  int effective_t_steps() const noexcept { return t_steps > 0 ? t_steps : 2 * L; }
  /// Throws DomainError / SizeError for invalid parameters.
  void validate() const;
};

struct TrajectoryRecord {
  double final_entropy = 0.0;
  std::vector<double> entropy_series;  ///< after each measurement layer
  long n_measurements = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// One brick-wall step: dressed cores on pairs (0,1), (2,3), ... followed by
/// pairs (1,2), (3,4), ... on the open chain. Every pair gets four fresh Haar
/// locals.
void brickwall_layer(StateVector& state, const TwoQubitGate& core, Rng& rng);
void brickwall_layer(StateVector& state, const CartanCoeffs& cartan, Rng& rng);

/// Measures each qubit (ascending order) in Z with probability p. Returns
/// the number of measured qubits.
int measurement_layer(StateVector& state, double p, Rng& rng);

/// Haar initial state, then t_steps x (brickwall_layer, measurement_layer).
/// Deterministic in config.seed.
TrajectoryRecord run_trajectory(const CircuitConfig& config);

/// Seed of trajectory `traj_index` at grid point `p_index`.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::size_t p_index,
                              std::size_t traj_index);

struct SweepRequest {
  int L = 0;
  CartanCoeffs cartan;
  std::vector<double> p_grid;
  int n_traj = 1500;
  int t_steps = 0;  ///< 0 means 2L
  std::uint64_t master_seed = 0;
  int workers = 1;
  int max_qubits = kDefaultMaxQubits;
};

/// Runs n_traj trajectories per grid point and reduces them in index order.
/// The result does not depend on `workers`.
EntropyCurve sweep(const SweepRequest& request);

/// Worker count from the MIPT_WORKERS environment variable (default 1).
int workers_from_environment();

}  // namespace mipt
