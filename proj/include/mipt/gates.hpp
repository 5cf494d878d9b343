#pragma once

#include <array>
#include <numbers>
#include <optional>

#include "mipt/qstate.hpp"
#include "mipt/rng.hpp"

namespace mipt {

/// Interaction angles of exp(-(i/2) sum_j c_j sigma_j (x) sigma_j), restricted
/// to the Weyl chamber 0 <= c3 <= c2 <= c1 <= pi/2.
struct CartanCoeffs {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  friend bool operator==(const CartanCoeffs&, const CartanCoeffs&) = default;
};

/// Local-unitary invariants of a two-qubit gate.
struct GateInvariants {
  double e_p = 0.0;   ///< entangling power, in [0, 2/3]
  double g_t = 0.0;   ///< gate typicality, in [0, 1]
  double E_U = 0.0;   ///< operator linear entanglement of U
  double E_US = 0.0;  ///< operator linear entanglement of U * SWAP
};

/// Operator Schmidt weights lambda_i (squared singular values of the
/// realigned matrix), sorted descending. For a unitary they sum to 4.
struct SchmidtSpectrum {
  std::array<double, 4> lambdas{};
};

/// E(SWAP) = 1 - 1/d^2 for qubits.
inline constexpr double kSwapOperatorEntanglement = 0.75;
inline constexpr double kMaxEntanglingPower = 2.0 / 3.0;

namespace cartan {
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr CartanCoeffs kIdentity{0.0, 0.0, 0.0};
inline constexpr CartanCoeffs kCnot{kHalfPi, 0.0, 0.0};
inline constexpr CartanCoeffs kIswap{kHalfPi, kHalfPi, 0.0};
inline constexpr CartanCoeffs kSwap{kHalfPi, kHalfPi, kHalfPi};

/// SWAP^alpha: c1 = c2 = c3 = alpha pi/2 (I -> SWAP parabola).
CartanCoeffs swap_power(double alpha);
/// CNOT^alpha: (alpha pi/2, 0, 0) (T-dual line I -> CNOT).
CartanCoeffs cnot_power(double alpha);
/// CNOT^(1-alpha) iSWAP^alpha: (pi/2, alpha pi/2, 0) (maximal e_p line).
CartanCoeffs cnot_to_iswap(double alpha);
/// SWAP^alpha iSWAP^(1-alpha): (pi/2, pi/2, alpha pi/2) (dual-unitary line).
CartanCoeffs iswap_to_swap(double alpha);
}  // namespace cartan

/// Throws DomainError unless 0 <= c3 <= c2 <= c1 <= pi/2 (tolerance 1e-12).
void validate_weyl(const CartanCoeffs& c);
bool in_weyl_chamber(const CartanCoeffs& c, double tol = 1e-12);

/// Closed-form Cartan core, diagonal in the Bell basis.
TwoQubitGate cartan_gate(const CartanCoeffs& c);

TwoQubitGate identity_gate();
TwoQubitGate swap_gate();
/// CNOT with qubit 0 (left factor) as control.
TwoQubitGate cnot_gate();

/// Haar-random element of U(2).
Matrix2 haar_su2(Rng& rng);

Matrix4 kron(const Matrix2& a, const Matrix2& b);

/// (w_k (x) w_k1) * core * (u_k (x) u_k1). Throws DomainError for any
/// non-unitary input.
TwoQubitGate dress_gate(const TwoQubitGate& core, const Matrix2& u_k, const Matrix2& u_k1,
                        const Matrix2& w_k, const Matrix2& w_k1);

/// Operator Schmidt decomposition of an arbitrary 4x4 matrix.
SchmidtSpectrum operator_schmidt(const Matrix4& op);
inline SchmidtSpectrum operator_schmidt(const TwoQubitGate& gate) {
  return operator_schmidt(gate.matrix);
}

/// E(U) = 1 - sum lambda_i^2 / 16.
double linear_operator_entanglement(const TwoQubitGate& gate);

GateInvariants invariants_from_gate(const TwoQubitGate& gate);
GateInvariants invariants_from_cartan(const CartanCoeffs& c);

/// Inverse of the (e_p, g_t) map on two faces of the Weyl chamber: the face
/// c3 = 0 is tried first, then the face c1 = c2. Throws OutsideRegionError
/// when neither face admits a solution.
CartanCoeffs cartan_from_invariants(double e_p, double g_t);

/// Non-throwing form of cartan_from_invariants; nullopt outside the
/// permissible region.
std::optional<CartanCoeffs> try_cartan_from_invariants(double e_p, double g_t);

/// min over phi of the Frobenius norm of a - e^{i phi} b.
double phase_insensitive_distance(const Matrix4& a, const Matrix4& b);

}  // namespace mipt
