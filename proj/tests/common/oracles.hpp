#pragma once

// Slow reference implementations used only as test oracles. None of them
// share code with the library paths they check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "mipt/analytics.hpp"
#include "mipt/gates.hpp"
#include "mipt/qstate.hpp"
#include "mipt/rng.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline int bit_of(std::size_t index, int n, int q) {
  return static_cast<int>((index >> (n - 1 - q)) & 1U);
}

// Applies a 4x4 gate by scanning every (output, input) pair of basis states
// that agree outside qubits i and j.
inline std::vector<cplx> apply_dense(const std::vector<cplx>& psi, const Eigen::Matrix4cd& g,
                                     int n, int i, int j) {
  const std::size_t dim = psi.size();
  std::vector<cplx> out(dim, 0.0);
  const std::size_t mask = (std::size_t{1} << (n - 1 - i)) | (std::size_t{1} << (n - 1 - j));
  for (std::size_t x = 0; x < dim; ++x) {
    for (std::size_t y = 0; y < dim; ++y) {
      if ((x & ~mask) != (y & ~mask)) continue;
      const int r = 2 * bit_of(x, n, i) + bit_of(x, n, j);
      const int c = 2 * bit_of(y, n, i) + bit_of(y, n, j);
      out[x] += g(r, c) * psi[y];
    }
  }
  return out;
}

// Von Neumann entropy of the subsystem `region` (list of qubits) from an
// explicitly summed reduced density matrix.
inline double subsystem_entropy(const std::vector<cplx>& psi, int n,
                                const std::vector<int>& region) {
  const int na = static_cast<int>(region.size());
  const std::size_t da = std::size_t{1} << na;
  auto local_index = [&](std::size_t full) {
    std::size_t a = 0;
    for (int q : region) a = (a << 1) | static_cast<std::size_t>(bit_of(full, n, q));
    return a;
  };
  std::vector<bool> in_a(n, false);
  for (int q : region) in_a[q] = true;
  auto env_key = [&](std::size_t full) {
    std::size_t e = 0;
    for (int q = 0; q < n; ++q)
      if (!in_a[q]) e = (e << 1) | static_cast<std::size_t>(bit_of(full, n, q));
    return e;
  };
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(da, da);
  for (std::size_t x = 0; x < psi.size(); ++x) {
    for (std::size_t y = 0; y < psi.size(); ++y) {
      if (env_key(x) != env_key(y)) continue;
      rho(local_index(x), local_index(y)) += psi[x] * std::conj(psi[y]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double l = es.eigenvalues()(k);
    if (l > 1e-14) s -= l * std::log(l);
  }
  return s;
}

inline double left_half_entropy(const std::vector<cplx>& psi, int n) {
  std::vector<int> region;
  for (int q = 0; q < n / 2; ++q) region.push_back(q);
  return subsystem_entropy(psi, n, region);
}

// Haar SU(2) from a uniformly random unit quaternion.
inline Eigen::Matrix2cd quaternion_su2(mipt::Rng& rng) {
  double q[4];
  double norm = 0.0;
  for (double& x : q) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : q) x /= norm;
  Eigen::Matrix2cd u;
  u << cplx{q[0], q[1]}, cplx{q[2], q[3]}, cplx{-q[2], q[3]}, cplx{q[0], -q[1]};
  return u;
}

inline std::vector<cplx> to_vector(const mipt::StateVector& s) {
  return {s.amplitudes().begin(), s.amplitudes().end()};
}

struct MeanStat {
  double sum = 0.0;
  double sum2 = 0.0;
  long n = 0;
  void add(double x) {
    sum += x;
    sum2 += x * x;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double std_err() const {
    const double m = mean();
    const double var = (sum2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  }
};

// Uniform point of the Weyl chamber by sorting three uniform angles.
inline mipt::CartanCoeffs random_weyl_point(mipt::Rng& rng) {
  constexpr double h = std::numbers::pi / 2;
  double c[3] = {rng.uniform() * h, rng.uniform() * h, rng.uniform() * h};
  std::sort(c, c + 3, std::greater<>());
  return {c[0], c[1], c[2]};
}

inline Eigen::Vector2cd random_qubit_state(mipt::Rng& rng) { return quaternion_su2(rng).col(0); }

// Three times the linear entropy of U|a>|b>, averaged over Haar product
// states. Its mean is the entangling power normalized to 2/3.
inline MeanStat product_state_linear_entropy(const Eigen::Matrix4cd& u, int samples,
                                             mipt::Rng& rng) {
  MeanStat lin;
  for (int k = 0; k < samples; ++k) {
    const auto a = random_qubit_state(rng);
    const auto b = random_qubit_state(rng);
    Eigen::Vector4cd psi;
    psi << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
    psi = u * psi;
    Eigen::Matrix2cd m;
    m << psi(0), psi(1), psi(2), psi(3);
    const Eigen::Matrix2cd rho = m * m.adjoint();
    lin.add(3.0 * (1.0 - (rho * rho).trace().real()));
  }
  return lin;
}

// Expected entropy of the measurement-only circuit by enumerating which of
// the 2N qubits escape measurement.
inline double enumerate_measured_subsets(int N, double p, int t) {
  const double q = std::pow(1.0 - p, t);
  double s = 0.0;
  for (unsigned mask = 0; mask < (1U << (2 * N)); ++mask) {
    const int kept_a = std::popcount(mask & ((1U << N) - 1));
    const int kept_b = std::popcount(mask >> N);
    const int kept = kept_a + kept_b;
    const double w = std::pow(q, kept) * std::pow(1.0 - q, 2 * N - kept);
    s += w * mipt::page_entropy(kept_a, kept_b);
  }
  return s;
}

}  // namespace oracle
