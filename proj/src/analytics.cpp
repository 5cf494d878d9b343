#include "mipt/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "mipt/errors.hpp"

namespace mipt {

namespace {

// Harmonic tails above this index use the Euler-Maclaurin expansion.
constexpr double kDirectSumLimit = 1048576.0;  // 2^20

// H(n) - ln(n) - gamma for large n.
double harmonic_remainder(double n) {
  const double n2 = n * n;
  return 1.0 / (2.0 * n) - 1.0 / (12.0 * n2) + 1.0 / (120.0 * n2 * n2);
}

// sum_{k = 2^lo_exp + 1}^{2^hi_exp} 1/k
double harmonic_between_powers(int lo_exp, int hi_exp) {
  if (hi_exp <= lo_exp) return 0.0;
  const double lo = std::ldexp(1.0, lo_exp);
  const double hi = std::ldexp(1.0, hi_exp);
  const double direct_end = std::min(hi, std::max(lo, kDirectSumLimit));

  double acc = 0.0;
  for (double k = direct_end; k > lo; k -= 1.0) acc += 1.0 / k;
  if (direct_end < hi) {
    const int direct_exp = static_cast<int>(std::lround(std::log2(direct_end)));
    acc += (hi_exp - direct_exp) * std::numbers::ln2 + harmonic_remainder(hi) -
           harmonic_remainder(direct_end);
  }
  return acc;
}

}  // namespace

void MeasurementOnlyParams::validate() const {
  if (N < 1) throw DomainError("N must be at least 1");
  if (t < 0) throw DomainError("t must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double page_entropy(int n_a, int n_b) {
  if (n_a < 0 || n_b < 0) {
    throw DomainError("page_entropy needs non-negative sizes, got (" + std::to_string(n_a) +
                      ", " + std::to_string(n_b) + ")");
  }
  const int lo = std::min(n_a, n_b);
  const int hi = std::max(n_a, n_b);
  if (lo == 0) return 0.0;
  const double correction = (std::ldexp(1.0, lo) - 1.0) / std::ldexp(1.0, hi + 1);
  return harmonic_between_powers(hi, n_a + n_b) - correction;
}

double unmeasured_probability(int N, int n_kept, double p, int t) {
  if (n_kept < 0 || n_kept > N) {
    throw DomainError("n_kept must lie in [0, N]");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  const double survive = std::pow(1.0 - p, t);
  return std::exp(log_binomial(N, n_kept)) * std::pow(survive, n_kept) *
         std::pow(1.0 - survive, N - n_kept);
}

double measurement_only_entropy(const MeasurementOnlyParams& params) {
  params.validate();
  const int N = params.N;
  std::vector<double> weight(N + 1);
  for (int k = 0; k <= N; ++k) weight[k] = unmeasured_probability(N, k, params.p, params.t);

  double s = 0.0;
  for (int na = 1; na <= N; ++na) {
    if (weight[na] == 0.0) continue;
    for (int nb = 1; nb <= N; ++nb) {
      if (weight[nb] == 0.0) continue;
      s += page_entropy(na, nb) * weight[na] * weight[nb];
    }
  }
  return s;
}

double unmeasured_mean_asymptote(int N, double p) {
  if (p < 0.0) throw DomainError("p must be non-negative");
  return N * std::exp(-4.0 * N * p);
}

}  // namespace mipt
