#include "mipt/gates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "mipt/errors.hpp"

namespace mipt {

namespace cartan {

CartanCoeffs swap_power(double alpha) {
  const double c = alpha * kHalfPi;
  return {c, c, c};
}

CartanCoeffs cnot_power(double alpha) { return {alpha * kHalfPi, 0.0, 0.0}; }

CartanCoeffs cnot_to_iswap(double alpha) { return {kHalfPi, alpha * kHalfPi, 0.0}; }

CartanCoeffs iswap_to_swap(double alpha) { return {kHalfPi, kHalfPi, alpha * kHalfPi}; }

}  // namespace cartan

namespace {

constexpr double kWeylTol = 1e-12;
constexpr double kRootTol = 1e-12;

bool is_unitary2(const Matrix2& u, double tol = 1e-10) {
  return (u.adjoint() * u - Matrix2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

double sin2(double x) {
  const double s = std::sin(x);
  return s * s;
}

double cos2(double x) {
  const double c = std::cos(x);
  return c * c;
}

double angle_from_sin2(double s2) { return std::asin(std::sqrt(std::clamp(s2, 0.0, 1.0))); }

bool in_unit(double x) { return x >= -kRootTol && x <= 1.0 + kRootTol; }

// Face c3 = 0, a = sin^2 c1, b = sin^2 c2:
//   a + b = 3 g_t,  a b = 3 g_t - (3/2) e_p.
std::optional<CartanCoeffs> solve_face_c3_zero(double e_p, double g_t) {
  const double sum = 3.0 * g_t;
  const double prod = 3.0 * g_t - 1.5 * e_p;
  const double disc = sum * sum - 4.0 * prod;
  if (disc < -kRootTol) return std::nullopt;
  const double r = std::sqrt(std::max(disc, 0.0));
  const double a = 0.5 * (sum + r);
  const double b = 0.5 * (sum - r);
  if (!in_unit(a) || !in_unit(b)) return std::nullopt;
  return CartanCoeffs{angle_from_sin2(a), angle_from_sin2(b), 0.0};
}

// Face c1 = c2, a = sin^2 c1, cc = sin^2 c3:
//   g_t = (2a + cc)/3,  (3/2) e_p = 3a^2 - 6 g_t a + 3 g_t,
// so a = g_t + sqrt(g_t^2 - g_t + e_p/2) (the other root violates cc <= a).
std::optional<CartanCoeffs> solve_face_c1_eq_c2(double e_p, double g_t) {
  const double disc = g_t * g_t - g_t + 0.5 * e_p;
  if (disc < -kRootTol) return std::nullopt;
  const double a = g_t + std::sqrt(std::max(disc, 0.0));
  const double cc = 3.0 * g_t - 2.0 * a;
  if (!in_unit(a) || !in_unit(cc) || cc > a + kRootTol) return std::nullopt;
  const double c12 = angle_from_sin2(a);
  return CartanCoeffs{c12, c12, std::min(angle_from_sin2(cc), c12)};
}

}  // namespace

bool in_weyl_chamber(const CartanCoeffs& c, double tol) {
  return c.c3 >= -tol && c.c2 >= c.c3 - tol && c.c1 >= c.c2 - tol &&
         c.c1 <= cartan::kHalfPi + tol;
}

void validate_weyl(const CartanCoeffs& c) {
  if (!in_weyl_chamber(c, kWeylTol)) {
    throw DomainError("Cartan coefficients (" + std::to_string(c.c1) + ", " +
                      std::to_string(c.c2) + ", " + std::to_string(c.c3) +
                      ") violate 0 <= c3 <= c2 <= c1 <= pi/2");
  }
}

TwoQubitGate cartan_gate(const CartanCoeffs& c) {
  validate_weyl(c);
  // sum_j c_j sigma_j sigma_j eigenvalues on the Bell states:
  //   Phi+ : c1 - c2 + c3    Phi- : -c1 + c2 + c3
  //   Psi+ : c1 + c2 - c3    Psi- : -c1 - c2 - c3
  const auto phase = [](double lambda) { return std::polar(1.0, -0.5 * lambda); };
  const cplx phi_p = phase(c.c1 - c.c2 + c.c3);
  const cplx phi_m = phase(-c.c1 + c.c2 + c.c3);
  const cplx psi_p = phase(c.c1 + c.c2 - c.c3);
  const cplx psi_m = phase(-c.c1 - c.c2 - c.c3);

  TwoQubitGate g;
  g.matrix.setZero();
  g.matrix(0, 0) = g.matrix(3, 3) = 0.5 * (phi_p + phi_m);
  g.matrix(0, 3) = g.matrix(3, 0) = 0.5 * (phi_p - phi_m);
  g.matrix(1, 1) = g.matrix(2, 2) = 0.5 * (psi_p + psi_m);
  g.matrix(1, 2) = g.matrix(2, 1) = 0.5 * (psi_p - psi_m);
  return g;
}

TwoQubitGate identity_gate() { return TwoQubitGate{}; }

TwoQubitGate swap_gate() {
  TwoQubitGate g;
  g.matrix.setZero();
  g.matrix(0, 0) = g.matrix(3, 3) = 1.0;
  g.matrix(1, 2) = g.matrix(2, 1) = 1.0;
  return g;
}

TwoQubitGate cnot_gate() {
  TwoQubitGate g;
  g.matrix.setZero();
  g.matrix(0, 0) = g.matrix(1, 1) = 1.0;
  g.matrix(2, 3) = g.matrix(3, 2) = 1.0;
  return g;
}

Matrix2 haar_su2(Rng& rng) {
  // Gram-Schmidt on a complex Ginibre matrix; R then has a positive real
  // diagonal, which makes Q Haar-distributed on U(2).
  Eigen::Vector2cd z1{cplx{rng.normal(), rng.normal()}, cplx{rng.normal(), rng.normal()}};
  Eigen::Vector2cd z2{cplx{rng.normal(), rng.normal()}, cplx{rng.normal(), rng.normal()}};
  const Eigen::Vector2cd q1 = z1 / z1.norm();
  Eigen::Vector2cd v2 = z2 - q1.dot(z2) * q1;
  const Eigen::Vector2cd q2 = v2 / v2.norm();
  Matrix2 u;
  u.col(0) = q1;
  u.col(1) = q2;
  return u;
}

Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

TwoQubitGate dress_gate(const TwoQubitGate& core, const Matrix2& u_k, const Matrix2& u_k1,
                        const Matrix2& w_k, const Matrix2& w_k1) {
  if (!core.is_unitary()) throw DomainError("core gate is not unitary");
  if (!is_unitary2(u_k) || !is_unitary2(u_k1) || !is_unitary2(w_k) || !is_unitary2(w_k1)) {
    throw DomainError("local dressing is not unitary");
  }
  return TwoQubitGate{kron(w_k, w_k1) * core.matrix * kron(u_k, u_k1)};
}

SchmidtSpectrum operator_schmidt(const Matrix4& op) {
  // R[(a,c),(b,d)] = U[(a,b),(c,d)]: rows index operators on the first
  // factor, columns operators on the second.
  Matrix4 realigned;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) realigned(2 * a + c, 2 * b + d) = op(2 * a + b, 2 * c + d);

  Eigen::JacobiSVD<Matrix4> svd(realigned);
  const auto& sv = svd.singularValues();
  SchmidtSpectrum out;
  for (int i = 0; i < 4; ++i) out.lambdas[i] = sv(i) * sv(i);
  std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
  return out;
}

double linear_operator_entanglement(const TwoQubitGate& gate) {
  const SchmidtSpectrum s = operator_schmidt(gate);
  double sum_sq = 0.0;
  for (double l : s.lambdas) sum_sq += l * l;
  return 1.0 - sum_sq / 16.0;
}

GateInvariants invariants_from_gate(const TwoQubitGate& gate) {
  constexpr double es = kSwapOperatorEntanglement;
  GateInvariants inv;
  inv.E_U = linear_operator_entanglement(gate);
  inv.E_US = linear_operator_entanglement(TwoQubitGate{gate.matrix * swap_gate().matrix});
  inv.e_p = (inv.E_U + inv.E_US - es) / es;
  inv.g_t = (inv.E_U - inv.E_US + es) / (2.0 * es);
  return inv;
}

GateInvariants invariants_from_cartan(const CartanCoeffs& c) {
  validate_weyl(c);
  const double s1 = sin2(c.c1), s2 = sin2(c.c2), s3 = sin2(c.c3);
  GateInvariants inv;
  inv.e_p = (2.0 / 3.0) * (s1 * cos2(c.c2) + s2 * cos2(c.c3) + s3 * cos2(c.c1));
  inv.g_t = (s1 + s2 + s3) / 3.0;
  // E_U + E_US = (3/4)(1 + e_p), E_U - E_US = (3/2) g_t - 3/4
  inv.E_U = 0.375 * inv.e_p + 0.75 * inv.g_t;
  inv.E_US = 0.75 + 0.375 * inv.e_p - 0.75 * inv.g_t;
  return inv;
}

std::optional<CartanCoeffs> try_cartan_from_invariants(double e_p, double g_t) {
  if (!std::isfinite(e_p) || !std::isfinite(g_t)) return std::nullopt;
  if (e_p < -kRootTol || e_p > kMaxEntanglingPower + kRootTol) return std::nullopt;
  if (g_t < -kRootTol || g_t > 1.0 + kRootTol) return std::nullopt;
  if (auto c = solve_face_c3_zero(e_p, g_t)) return c;
  return solve_face_c1_eq_c2(e_p, g_t);
}

CartanCoeffs cartan_from_invariants(double e_p, double g_t) {
  if (auto c = try_cartan_from_invariants(e_p, g_t)) return *c;
  throw OutsideRegionError("(e_p, g_t) = (" + std::to_string(e_p) + ", " + std::to_string(g_t) +
                           ") is outside the permissible two-qubit region");
}

double phase_insensitive_distance(const Matrix4& a, const Matrix4& b) {
  const double overlap = std::abs((b.adjoint() * a).trace());
  const double d2 = a.squaredNorm() + b.squaredNorm() - 2.0 * overlap;
  return std::sqrt(std::max(d2, 0.0));
}

}  // namespace mipt
