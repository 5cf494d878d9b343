#pragma once

#include <cstdint>
#include <vector>

namespace mipt {

/// Trajectory-averaged half-chain entropy versus measurement probability for
/// one system size.
struct EntropyCurve {
  int L = 0;
  std::vector<double> p_values;      ///< strictly ascending
  std::vector<double> mean_entropy;  ///< nats
  std::vector<double> std_dev;       ///< per-trajectory standard deviation
  std::vector<double> std_err;       ///< std_dev / sqrt(n_traj)
  int n_traj = 0;
  std::uint64_t master_seed = 0;

  std::size_t size() const noexcept { return p_values.size(); }

  /// Throws DomainError when the columns disagree in length or p is not
  /// strictly ascending.
  void validate() const;

  friend bool operator==(const EntropyCurve&, const EntropyCurve&) = default;
};

}  // namespace mipt
