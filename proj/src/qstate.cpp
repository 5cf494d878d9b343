#include "mipt/qstate.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <cmath>
#include <string>

#include "mipt/errors.hpp"

namespace mipt {

namespace {

void check_size(int n_qubits, int max_qubits) {
  if (n_qubits < 1) {
    throw SizeError("register needs at least one qubit, got " + std::to_string(n_qubits));
  }
  if (n_qubits > max_qubits) {
    throw SizeError("register of " + std::to_string(n_qubits) +
                    " qubits exceeds the memory cap of " + std::to_string(max_qubits));
  }
}

int bit_position(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

}  // namespace

bool TwoQubitGate::is_unitary(double tol) const {
  const Matrix4 prod = matrix.adjoint() * matrix;
  return (prod - Matrix4::Identity()).cwiseAbs().maxCoeff() <= tol;
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index, int max_qubits) {
  check_size(n_qubits, max_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (index >= dim) {
    throw IndexError("basis index " + std::to_string(index) + " out of range");
  }
  std::vector<cplx> amps(dim, cplx{0.0, 0.0});
  amps[index] = 1.0;
  return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amplitudes, int max_qubits) {
  const std::size_t dim = amplitudes.size();
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw SizeError("amplitude count " + std::to_string(dim) + " is not a power of two");
  }
  const int n = std::countr_zero(dim);
  check_size(n, max_qubits);
  StateVector s(n, std::move(amplitudes));
  if (std::abs(s.norm_squared() - 1.0) > 1e-10) {
    throw NumericalError("amplitudes are not normalized");
  }
  return s;
}

double StateVector::norm_squared() const noexcept {
  double acc = 0.0;
  for (const cplx& a : amps_) acc += std::norm(a);
  return acc;
}

StateVector haar_random_state(int n_qubits, Rng& rng, int max_qubits) {
  if (n_qubits < 2) {
    throw SizeError("Haar state needs L >= 2, got " + std::to_string(n_qubits));
  }
  check_size(n_qubits, max_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<cplx> amps(dim);
  double norm2 = 0.0;
  for (cplx& a : amps) {
    const double re = rng.normal();
    const double im = rng.normal();
    a = cplx{re, im};
    norm2 += re * re + im * im;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (cplx& a : amps) a *= inv;
  return StateVector::from_amplitudes(std::move(amps), max_qubits);
}

void apply_two_qubit(StateVector& state, const TwoQubitGate& gate, int i, int j) {
  if (!gate.is_unitary()) {
    throw DomainError("two-qubit gate is not unitary within 1e-10");
  }
  apply_two_qubit_unchecked(state, gate.matrix, i, j);
}

void apply_two_qubit_unchecked(StateVector& state, const Matrix4& gate, int i, int j) {
  const int n = state.n_qubits();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) {
    throw IndexError("invalid qubit pair (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") for " + std::to_string(n) + " qubits");
  }

  // Split real/imaginary parts so the inner loop avoids the library complex
  // multiply (which carries NaN/Inf recovery branches).
  double gr[4][4];
  double gi[4][4];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      gr[r][c] = gate(r, c).real();
      gi[r][c] = gate(r, c).imag();
    }
  }

  const std::size_t mi = std::size_t{1} << bit_position(n, i);
  const std::size_t mj = std::size_t{1} << bit_position(n, j);
  const std::size_t lo = std::min(mi, mj);
  const std::size_t hi = std::max(mi, mj);
  const std::size_t dim = state.dimension();
  auto* amp = reinterpret_cast<double*>(state.mutable_amplitudes().data());

  const std::size_t offs[4] = {0, mj, mi, mi | mj};

  for (std::size_t a = 0; a < dim; a += 2 * hi) {
    for (std::size_t b = a; b < a + hi; b += 2 * lo) {
      for (std::size_t base = b; base < b + lo; ++base) {
        double xr[4];
        double xi[4];
        for (int k = 0; k < 4; ++k) {
          xr[k] = amp[2 * (base + offs[k])];
          xi[k] = amp[2 * (base + offs[k]) + 1];
        }
        for (int r = 0; r < 4; ++r) {
          double yr = 0.0;
          double yi = 0.0;
          for (int k = 0; k < 4; ++k) {
            yr += gr[r][k] * xr[k] - gi[r][k] * xi[k];
            yi += gr[r][k] * xi[k] + gi[r][k] * xr[k];
          }
          amp[2 * (base + offs[r])] = yr;
          amp[2 * (base + offs[r]) + 1] = yi;
        }
      }
    }
  }
}

double probability_zero(const StateVector& state, int qubit) {
  const int n = state.n_qubits();
  if (qubit < 0 || qubit >= n) {
    throw IndexError("qubit " + std::to_string(qubit) + " out of range");
  }
  const std::size_t m = std::size_t{1} << bit_position(n, qubit);
  const auto amps = state.amplitudes();
  double p0 = 0.0;
  for (std::size_t a = 0; a < amps.size(); a += 2 * m) {
    for (std::size_t k = a; k < a + m; ++k) p0 += std::norm(amps[k]);
  }
  return p0;
}

int measure_z(StateVector& state, int qubit, Rng& rng) {
  const int n = state.n_qubits();
  if (qubit < 0 || qubit >= n) {
    throw IndexError("qubit " + std::to_string(qubit) + " out of range");
  }
  const std::size_t m = std::size_t{1} << bit_position(n, qubit);
  auto amps = state.mutable_amplitudes();

  double p0 = 0.0;
  double p1 = 0.0;
  for (std::size_t a = 0; a < amps.size(); a += 2 * m) {
    for (std::size_t k = a; k < a + m; ++k) {
      p0 += std::norm(amps[k]);
      p1 += std::norm(amps[k + m]);
    }
  }
  constexpr double kFloor = 1e-14;
  if (p0 < kFloor && p1 < kFloor) {
    throw NumericalError("both measurement branches have vanishing probability");
  }

  int outcome = rng.uniform() * (p0 + p1) < p0 ? 0 : 1;
  // A branch this light is only reachable through round-off in the draw.
  if (outcome == 0 && p0 < kFloor) outcome = 1;
  if (outcome == 1 && p1 < kFloor) outcome = 0;

  const double scale = 1.0 / std::sqrt(outcome == 0 ? p0 : p1);
  for (std::size_t a = 0; a < amps.size(); a += 2 * m) {
    for (std::size_t k = a; k < a + m; ++k) {
      if (outcome == 0) {
        amps[k] *= scale;
        amps[k + m] = 0.0;
      } else {
        amps[k] = 0.0;
        amps[k + m] *= scale;
      }
    }
  }
  return outcome;
}

std::vector<double> half_chain_spectrum(const StateVector& state) {
  const int n = state.n_qubits();
  if (n % 2 != 0) {
    throw BipartitionError("half-chain cut needs an even qubit count, got " + std::to_string(n));
  }
  const Eigen::Index half = Eigen::Index{1} << (n / 2);
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> psi(state.amplitudes().data(), half, half);

  Eigen::MatrixXcd gram(half, half);
  gram.noalias() = psi * psi.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Gram eigensolver did not converge");
  }

  std::vector<double> lambdas(solver.eigenvalues().data(),
                              solver.eigenvalues().data() + solver.eigenvalues().size());
  double total = 0.0;
  for (double& l : lambdas) {
    l = std::max(l, 0.0);
    total += l;
  }
  for (double& l : lambdas) l /= total;
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  return lambdas;
}

double entropy_from_spectrum(std::span<const double> lambdas) {
  double s = 0.0;
  for (double l : lambdas) {
    if (l >= 1e-14) s -= l * std::log(l);
  }
  return std::max(s, 0.0);
}

double half_chain_entropy(const StateVector& state) {
  const auto spectrum = half_chain_spectrum(state);
  return entropy_from_spectrum(spectrum);
}

}  // namespace mipt
