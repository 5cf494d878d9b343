#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mipt/rng.hpp"

namespace mipt {

using cplx = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

/// Largest register accepted unless a caller raises the cap explicitly.
/// 2^24 amplitudes is 256 MiB.
inline constexpr int kDefaultMaxQubits = 24;

/// Dense 4x4 gate acting on an ordered qubit pair (i, j). Row/column index
/// is 2*bit_i + bit_j, i.e. the first qubit is the left tensor factor.
struct TwoQubitGate {
  Matrix4 matrix = Matrix4::Identity();

  bool is_unitary(double tol = 1e-10) const;
};

/// Pure state of L qubits.
///
/// Qubit 0 is the most significant bit of the basis-state index: basis state
/// |b_0 b_1 ... b_{L-1}> sits at index sum_q b_q 2^(L-1-q).
class StateVector {
 public:
  /// Computational basis state |index>.
  static StateVector basis(int n_qubits, std::uint64_t index,
                           int max_qubits = kDefaultMaxQubits);

  /// Takes ownership of `amplitudes`; the length must be a power of two and
  /// the vector must be normalized within 1e-10.
  static StateVector from_amplitudes(std::vector<cplx> amplitudes,
                                     int max_qubits = kDefaultMaxQubits);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  std::span<cplx> mutable_amplitudes() noexcept { return amps_; }
  double norm_squared() const noexcept;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  StateVector(int n_qubits, std::vector<cplx> amps)
      : n_qubits_(n_qubits), amps_(std::move(amps)) {}

  int n_qubits_ = 0;
  std::vector<cplx> amps_;
};

/// Haar-random pure state: a normalized vector of 2^L i.i.d. standard complex
/// Gaussians. Throws SizeError for L < 2 or L > max_qubits.
StateVector haar_random_state(int n_qubits, Rng& rng,
                              int max_qubits = kDefaultMaxQubits);

/// Applies `gate` to qubits (i, j) in place. Throws IndexError for i == j or
/// out-of-range indices and DomainError for a non-unitary gate.
void apply_two_qubit(StateVector& state, const TwoQubitGate& gate, int i, int j);

/// Same as apply_two_qubit, without the unitarity check. For callers that
/// construct gates as products of unitaries.
void apply_two_qubit_unchecked(StateVector& state, const Matrix4& gate, int i, int j);

/// Projective Pauli-Z measurement with Born-rule outcome; returns the bit.
/// The post-measurement state is renormalized and amplitudes of the rejected
/// branch are set to exactly zero.
int measure_z(StateVector& state, int qubit, Rng& rng);

/// Probability of outcome 0 on `qubit`.
double probability_zero(const StateVector& state, int qubit);

/// Schmidt spectrum (descending) across the cut [0, L/2) | [L/2, L).
/// Eigenvalues of the Gram matrix, clamped at zero and normalized to unit sum.
std::vector<double> half_chain_spectrum(const StateVector& state);

/// Von Neumann entropy in nats across the half-chain cut. Throws
/// BipartitionError for odd L. Schmidt weights below 1e-14 contribute 0.
double half_chain_entropy(const StateVector& state);

/// -sum lambda ln lambda over weights >= 1e-14.
double entropy_from_spectrum(std::span<const double> lambdas);

}  // namespace mipt
