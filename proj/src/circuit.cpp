#include "mipt/circuit.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "mipt/errors.hpp"
#include "mipt/parallel.hpp"

namespace mipt {

void EntropyCurve::validate() const {
  const std::size_t n = p_values.size();
  if (mean_entropy.size() != n || std_err.size() != n ||
      (!std_dev.empty() && std_dev.size() != n)) {
    throw DomainError("entropy curve columns have mismatched lengths");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(p_values[i] > p_values[i - 1])) {
      throw DomainError("entropy curve p values must be strictly ascending");
    }
  }
}

void CircuitConfig::validate() const {
  if (L % 2 != 0 || L < 4) {
    throw DomainError("circuit needs an even L >= 4, got " + std::to_string(L));
  }
  if (L > max_qubits) {
    throw SizeError("L = " + std::to_string(L) + " exceeds the memory cap of " +
                    std::to_string(max_qubits));
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("measurement probability must lie in [0, 1]");
  }
  if (t_steps < 0) throw DomainError("t_steps must be positive");
  validate_weyl(cartan);
}

namespace {

void apply_dressed(StateVector& state, const Matrix4& core, int site, Rng& rng) {
  const Matrix2 u_k = haar_su2(rng);
  const Matrix2 u_k1 = haar_su2(rng);
  const Matrix2 w_k = haar_su2(rng);
  const Matrix2 w_k1 = haar_su2(rng);
  const Matrix4 gate = kron(w_k, w_k1) * core * kron(u_k, u_k1);
  apply_two_qubit_unchecked(state, gate, site, site + 1);
}

}  // namespace

void brickwall_layer(StateVector& state, const TwoQubitGate& core, Rng& rng) {
  const int n = state.n_qubits();
  for (int k = 0; k + 1 < n; k += 2) apply_dressed(state, core.matrix, k, rng);
  for (int k = 1; k + 1 < n; k += 2) apply_dressed(state, core.matrix, k, rng);
}

void brickwall_layer(StateVector& state, const CartanCoeffs& cartan, Rng& rng) {
  brickwall_layer(state, cartan_gate(cartan), rng);
}

int measurement_layer(StateVector& state, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("measurement probability must lie in [0, 1]");
  }
  int count = 0;
  for (int q = 0; q < state.n_qubits(); ++q) {
    if (rng.uniform_open_closed() <= p) {
      measure_z(state, q, rng);
      ++count;
    }
  }
  return count;
}

TrajectoryRecord run_trajectory(const CircuitConfig& config) {
  config.validate();
  const int steps = config.effective_t_steps();
  const TwoQubitGate core = cartan_gate(config.cartan);

  Rng rng(config.seed);
  StateVector state = haar_random_state(config.L, rng, config.max_qubits);

  TrajectoryRecord rec;
  rec.seed = config.seed;
  if (config.record_timeseries) rec.entropy_series.reserve(steps);
  for (int t = 0; t < steps; ++t) {
    brickwall_layer(state, core, rng);
    rec.n_measurements += measurement_layer(state, config.p, rng);
    if (config.record_timeseries) rec.entropy_series.push_back(half_chain_entropy(state));
  }
  rec.final_entropy =
      config.record_timeseries ? rec.entropy_series.back() : half_chain_entropy(state);
  return rec;
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::size_t p_index,
                              std::size_t traj_index) {
  return derive_seed(master_seed, {p_index, traj_index});
}

EntropyCurve sweep(const SweepRequest& request) {
  if (request.n_traj < 1) throw DomainError("n_traj must be at least 1");
  if (request.p_grid.empty()) throw DomainError("p grid is empty");
  for (std::size_t i = 0; i < request.p_grid.size(); ++i) {
    const double p = request.p_grid[i];
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p grid values must lie in [0, 1]");
    if (i > 0 && !(p > request.p_grid[i - 1])) {
      throw DomainError("p grid must be strictly ascending");
    }
  }
  CircuitConfig base;
  base.L = request.L;
  base.cartan = request.cartan;
  base.t_steps = request.t_steps;
  base.max_qubits = request.max_qubits;
  base.validate();

  const std::size_t n_p = request.p_grid.size();
  const auto n_traj = static_cast<std::size_t>(request.n_traj);
  std::vector<double> finals(n_p * n_traj);

  parallel_for(n_p * n_traj, request.workers, [&](std::size_t task) {
    const std::size_t ip = task / n_traj;
    const std::size_t it = task % n_traj;
    CircuitConfig cfg = base;
    cfg.p = request.p_grid[ip];
    cfg.seed = trajectory_seed(request.master_seed, ip, it);
    finals[task] = run_trajectory(cfg).final_entropy;
  });

  EntropyCurve curve;
  curve.L = request.L;
  curve.p_values = request.p_grid;
  curve.n_traj = request.n_traj;
  curve.master_seed = request.master_seed;
  for (std::size_t ip = 0; ip < n_p; ++ip) {
    const double* s = finals.data() + ip * n_traj;
    double mean = 0.0;
    for (std::size_t it = 0; it < n_traj; ++it) mean += s[it];
    mean /= static_cast<double>(n_traj);
    double var = 0.0;
    for (std::size_t it = 0; it < n_traj; ++it) var += (s[it] - mean) * (s[it] - mean);
    var = n_traj > 1 ? var / static_cast<double>(n_traj - 1) : 0.0;
    const double sd = std::sqrt(var);
    curve.mean_entropy.push_back(mean);
    curve.std_dev.push_back(sd);
    curve.std_err.push_back(sd / std::sqrt(static_cast<double>(n_traj)));
  }
  return curve;
}

int workers_from_environment() {
  if (const char* env = std::getenv("MIPT_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

}  // namespace mipt
