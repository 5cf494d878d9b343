#pragma once

namespace mipt {

/// Number of qubits per half (N = L/2), measurement probability and number
/// of measurement layers for the measurement-only circuit.
struct MeasurementOnlyParams {
  int N = 1;
  double p = 0.0;
  int t = 0;

  void validate() const;
};

/// Haar-averaged entanglement entropy (nats) of a pure state on N_A + N_B
/// qubits across the N_A | N_B cut:
///   sum_{k = 2^max + 1}^{2^(N_A + N_B)} 1/k - (2^min - 1) / 2^(max + 1).
/// Zero when either side is empty. Throws DomainError for negative sizes.
double page_entropy(int n_a, int n_b);

/// Probability that exactly `n_kept` of N qubits escape measurement over t
/// layers: C(N, n_kept) (1-p)^(t n_kept) (1 - (1-p)^t)^(N - n_kept).
double unmeasured_probability(int N, int n_kept, double p, int t);

/// Expected half-chain entropy of the identity-core circuit, assuming the
/// unmeasured qubits stay Haar-random.
double measurement_only_entropy(const MeasurementOnlyParams& params);

/// Large-N estimate N e^(-4 N p) of the mean number of unmeasured qubits per
/// half at t = 4N.
double unmeasured_mean_asymptote(int N, double p);

/// Natural log of the binomial coefficient C(n, k).
double log_binomial(int n, int k);

}  // namespace mipt
