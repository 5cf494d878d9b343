#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mipt/errors.hpp"
#include "mipt/experiment.hpp"
#include "mipt/gates.hpp"
#include "common/oracles.hpp"

using namespace mipt;

namespace {

constexpr double kPi = std::numbers::pi;

// exp(-(i/2) sum_j c_j sigma_j (x) sigma_j) by numerical diagonalization of
// the Hermitian generator.
Matrix4 cartan_by_diagonalization(const CartanCoeffs& c) {
  Matrix2 sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, cplx{0, -1}, cplx{0, 1}, 0;
  sz << 1, 0, 0, -1;
  const Matrix4 h = c.c1 * kron(sx, sx) + c.c2 * kron(sy, sy) + c.c3 * kron(sz, sz);
  Eigen::SelfAdjointEigenSolver<Matrix4> es(h);
  Matrix4 d = Matrix4::Zero();
  for (int k = 0; k < 4; ++k) d(k, k) = std::exp(cplx{0.0, -0.5 * es.eigenvalues()(k)});
  return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

double max_abs_diff(const Matrix4& a, const Matrix4& b) { return (a - b).cwiseAbs().maxCoeff(); }

TwoQubitGate random_dressing(const TwoQubitGate& core, Rng& rng) {
  return dress_gate(core, haar_su2(rng), haar_su2(rng), haar_su2(rng), haar_su2(rng));
}

}  // namespace

TEST_CASE("Cartan gate closed form") {
  CHECK(max_abs_diff(cartan_gate(cartan::kIdentity).matrix, Matrix4::Identity()) < 1e-15);

  const Matrix4 swap_phase = std::exp(cplx{0.0, -kPi / 4}) * swap_gate().matrix;
  CHECK(max_abs_diff(cartan_gate(cartan::kSwap).matrix, swap_phase) < 1e-12);

  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    const auto c = oracle::random_weyl_point(rng);
    const auto g = cartan_gate(c);
    CHECK(g.is_unitary(1e-12));
    CHECK(max_abs_diff(g.matrix, cartan_by_diagonalization(c)) < 1e-12);
  }
}

TEST_CASE("Weyl ordering is enforced") {
  CHECK_THROWS_AS(cartan_gate({0.1, 0.2, 0.0}), DomainError);
  CHECK_THROWS_AS(cartan_gate({0.3, 0.2, -0.1}), DomainError);
  CHECK_THROWS_AS(cartan_gate({2.0, 0.0, 0.0}), DomainError);
  CHECK_NOTHROW(cartan_gate({kPi / 2, kPi / 2, kPi / 2}));
}

TEST_CASE("Haar single-qubit unitaries") {
  Rng rng(42);
  oracle::MeanStat entry, trace, trace_ref;
  for (int k = 0; k < 100000; ++k) {
    const Matrix2 u = haar_su2(rng);
    if (k < 1000) REQUIRE((u.adjoint() * u - Matrix2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    entry.add(std::norm(u(0, 0)));
    trace.add(std::norm(u.trace()) / 4.0);
    trace_ref.add(std::norm(oracle::quaternion_su2(rng).trace()) / 4.0);
  }
  CHECK(std::abs(entry.mean() - 0.5) < 3.0 * entry.std_err());
  CHECK(std::abs(trace.mean() - 0.25) < 3.0 * trace.std_err());
  // The SU(2) reference has the same |trace|^2 law as U(2) Haar up to a phase
  // average, which does not change |trace|.
  const double combined = std::hypot(trace.std_err(), trace_ref.std_err());
  CHECK(std::abs(trace.mean() - trace_ref.mean()) < 3.0 * combined);
}

TEST_CASE("dressing") {
  Rng rng(7);
  const Matrix2 id = Matrix2::Identity();
  const auto core = cartan_gate({1.2, 0.5, 0.1});
  CHECK(max_abs_diff(dress_gate(core, id, id, id, id).matrix, core.matrix) == 0.0);

  const auto product = random_dressing(identity_gate(), rng);
  CHECK(std::abs(linear_operator_entanglement(product)) < 1e-10);

  Matrix2 bad = id;
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(dress_gate(core, bad, id, id, id), DomainError);
  TwoQubitGate bad_core;
  bad_core.matrix(3, 3) = 0.0;
  CHECK_THROWS_AS(dress_gate(bad_core, id, id, id, id), DomainError);
}

TEST_CASE("operator Schmidt spectra of the reference gates") {
  auto check = [](const TwoQubitGate& g, std::array<double, 4> expected) {
    const auto s = operator_schmidt(g);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(s.lambdas[k] - expected[k]) < 1e-10);
  };
  check(identity_gate(), {4, 0, 0, 0});
  check(swap_gate(), {1, 1, 1, 1});
  check(cnot_gate(), {2, 2, 0, 0});

  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto core = cartan_gate(oracle::random_weyl_point(rng));
    const auto s = operator_schmidt(random_dressing(core, rng));
    CHECK(std::abs(s.lambdas[0] + s.lambdas[1] + s.lambdas[2] + s.lambdas[3] - 4.0) < 1e-9);
  }
}

TEST_CASE("linear operator entanglement") {
  CHECK(std::abs(linear_operator_entanglement(identity_gate())) < 1e-12);
  CHECK(std::abs(linear_operator_entanglement(swap_gate()) - 0.75) < 1e-12);
  CHECK(std::abs(linear_operator_entanglement(cnot_gate()) - 0.5) < 1e-12);
}

TEST_CASE("invariants of the chamber vertices") {
  struct Vertex {
    CartanCoeffs c;
    TwoQubitGate g;
    double e_p, g_t;
  };
  const Vertex vertices[] = {
      {cartan::kIdentity, identity_gate(), 0.0, 0.0},
      {cartan::kCnot, cnot_gate(), 2.0 / 3.0, 1.0 / 3.0},
      {cartan::kIswap, cartan_gate(cartan::kIswap), 2.0 / 3.0, 2.0 / 3.0},
      {cartan::kSwap, swap_gate(), 0.0, 1.0},
  };
  for (const auto& v : vertices) {
    const auto a = invariants_from_cartan(v.c);
    const auto b = invariants_from_gate(v.g);
    const auto c = invariants_from_gate(cartan_gate(v.c));
    for (const auto& inv : {a, b, c}) {
      CHECK(std::abs(inv.e_p - v.e_p) < 1e-10);
      CHECK(std::abs(inv.g_t - v.g_t) < 1e-10);
    }
  }
  const auto half = invariants_from_cartan({kPi / 4, kPi / 4, kPi / 4});
  CHECK(std::abs(half.e_p - 0.5) < 1e-12);
  CHECK(std::abs(half.g_t - 0.5) < 1e-12);
}

TEST_CASE("closed-form and Schmidt invariants agree across the chamber") {
  Rng rng(100);
  for (int k = 0; k < 100; ++k) {
    const auto c = oracle::random_weyl_point(rng);
    const auto a = invariants_from_cartan(c);
    const auto b = invariants_from_gate(cartan_gate(c));
    CHECK(std::abs(a.e_p - b.e_p) < 1e-10);
    CHECK(std::abs(a.g_t - b.g_t) < 1e-10);
    CHECK(std::abs(a.E_U - b.E_U) < 1e-10);
    CHECK(std::abs(a.E_US - b.E_US) < 1e-10);
    CHECK(std::abs(a.e_p - (a.E_U + a.E_US - 0.75) / 0.75) < 1e-10);
    CHECK(std::abs(a.g_t - (a.E_U - a.E_US + 0.75) / 1.5) < 1e-10);
  }
}

TEST_CASE("invariants are unchanged by local dressing") {
  Rng rng(55);
  for (int k = 0; k < 100; ++k) {
    const auto core = cartan_gate(oracle::random_weyl_point(rng));
    const auto a = invariants_from_gate(core);
    const auto b = invariants_from_gate(random_dressing(core, rng));
    CHECK(std::abs(a.e_p - b.e_p) < 1e-10);
    CHECK(std::abs(a.g_t - b.g_t) < 1e-10);
  }
}

TEST_CASE("entangling power equals three times the mean product-state linear entropy") {
  Rng rng(314);
  for (int point = 0; point < 10; ++point) {
    const auto c = oracle::random_weyl_point(rng);
    const Matrix4 u = cartan_gate(c).matrix;
    const auto lin = oracle::product_state_linear_entropy(u, 10000, rng);
    CHECK(std::abs(lin.mean() - invariants_from_cartan(c).e_p) < 3.0 * lin.std_err());
  }
}

TEST_CASE("dual-unitary and T-dual lines") {
  for (double c3 = 0.0; c3 <= kPi / 2 + 1e-12; c3 += kPi / 40) {
    const auto inv = invariants_from_gate(cartan_gate({kPi / 2, kPi / 2, std::min(c3, kPi / 2)}));
    CHECK(std::abs(inv.E_U - 0.75) < 1e-10);
  }
  for (double c1 = 0.0; c1 <= kPi / 2 + 1e-12; c1 += kPi / 40) {
    const auto inv = invariants_from_gate(cartan_gate({std::min(c1, kPi / 2), 0.0, 0.0}));
    CHECK(std::abs(inv.E_US - 0.75) < 1e-10);
  }
}

TEST_CASE("invariant ranges over the chamber") {
  Rng rng(9);
  for (int k = 0; k < 10000; ++k) {
    const auto inv = invariants_from_cartan(oracle::random_weyl_point(rng));
    REQUIRE(inv.e_p >= -1e-15);
    REQUIRE(inv.e_p <= 2.0 / 3.0 + 1e-12);
    REQUIRE(inv.g_t >= -1e-15);
    REQUIRE(inv.g_t <= 1.0 + 1e-12);
  }
}

TEST_CASE("inverse map from invariants to Cartan coefficients") {
  auto near = [](const CartanCoeffs& a, const CartanCoeffs& b) {
    return std::abs(a.c1 - b.c1) < 1e-10 && std::abs(a.c2 - b.c2) < 1e-10 &&
           std::abs(a.c3 - b.c3) < 1e-10;
  };
  CHECK(near(cartan_from_invariants(2.0 / 3.0, 1.0 / 3.0), cartan::kCnot));
  CHECK(near(cartan_from_invariants(0.0, 0.0), cartan::kIdentity));
  CHECK(near(cartan_from_invariants(2.0 / 3.0, 2.0 / 3.0), cartan::kIswap));
  CHECK(near(cartan_from_invariants(0.0, 1.0), cartan::kSwap));
  CHECK(near(cartan_from_invariants(0.5, 0.5), {kPi / 4, kPi / 4, kPi / 4}));

  CHECK_THROWS_AS(cartan_from_invariants(0.7, 0.5), OutsideRegionError);
  CHECK_THROWS_AS(cartan_from_invariants(0.6, 0.05), OutsideRegionError);
  CHECK_THROWS_AS(cartan_from_invariants(0.1, 0.9), OutsideRegionError);
  CHECK_FALSE(try_cartan_from_invariants(-0.1, 0.5).has_value());

  SUBCASE("round trip over a 614-point plane sample") {
    const auto pts = sample_plane_points(614, 2023);
    REQUIRE(pts.size() == 614);
    for (const auto& [e, g] : pts) {
      const auto c = cartan_from_invariants(e, g);
      CHECK(in_weyl_chamber(c));
      const auto inv = invariants_from_cartan(c);
      CHECK(std::abs(inv.e_p - e) < 1e-9);
      CHECK(std::abs(inv.g_t - g) < 1e-9);
    }
  }
  SUBCASE("every chamber image is recovered") {
    Rng rng(17);
    for (int k = 0; k < 2000; ++k) {
      const auto inv = invariants_from_cartan(oracle::random_weyl_point(rng));
      const auto c = try_cartan_from_invariants(inv.e_p, inv.g_t);
      REQUIRE(c.has_value());
      const auto back = invariants_from_cartan(*c);
      CHECK(std::abs(back.e_p - inv.e_p) < 1e-9);
      CHECK(std::abs(back.g_t - inv.g_t) < 1e-9);
    }
  }
}

TEST_CASE("boundary families") {
  CHECK(cartan::swap_power(0.5) == CartanCoeffs{kPi / 4, kPi / 4, kPi / 4});
  CHECK(cartan::cnot_to_iswap(0.0) == cartan::kCnot);
  CHECK(cartan::cnot_to_iswap(1.0) == cartan::kIswap);
  CHECK(cartan::iswap_to_swap(1.0) == cartan::kSwap);
  for (double a = 0.0; a <= 1.0; a += 0.125) {
    CHECK(std::abs(invariants_from_cartan(cartan::cnot_to_iswap(a)).e_p - 2.0 / 3.0) < 1e-12);
  }
}

TEST_CASE("phase-insensitive distance ignores global phase") {
  const Matrix4 s = swap_gate().matrix;
  CHECK(phase_insensitive_distance(s, std::exp(cplx{0, 1.3}) * s) < 1e-7);
  CHECK(phase_insensitive_distance(s, Matrix4::Identity()) > 1.0);
}
