#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mipt/curve.hpp"

namespace mipt {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  double width() const noexcept { return hi - lo; }
};

/// Result of a finite-size data collapse S - S_c(L) = F((p - p_c) L^(1/nu)).
struct CollapseFit {
  double p_c = 0.0;
  double nu = 0.0;
  double p_c_err = 0.0;
  double nu_err = 0.0;
  double quality = 0.0;  ///< objective at the optimum
  std::vector<int> sizes_used;
  bool converged = true;  ///< false when the simplex did not beat the grid
  int n_bootstrap = 0;
};

struct FitOptions {
  Interval p_c_range{0.05, 0.6};
  Interval nu_range{0.5, 4.0};
  int grid_p_c = 50;
  int grid_nu = 50;
  int n_bootstrap = 100;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Only points with p inside this window enter the objective.
  std::optional<Interval> p_data_range;
};

/// Error-weighted master-curve residual of the collapse at (p_c, nu).
///
/// Each point becomes x = (p - p_c) L^(1/nu), y = S - S_c(L) with S_c(L) the
/// natural-cubic-spline value of that curve at p_c. Every point is compared
/// with the linear interpolation of each other size's transformed curve at
/// the same x (where x is inside that curve's support); the result is the
/// mean of r^2 / var(r) over all comparisons. var(r) adds the point variance,
/// the interpolated variance of the other curve, and the variance of both
/// anchors (each curve's interpolated variance at p_c), since a noisy anchor
/// shifts every y of its curve.
///
/// Throws DomainError when p_c is outside any curve's p range or nu <= 0,
/// and DegenerateFitError for fewer than 3 distinct sizes, fewer than 5
/// comparable points, or curves without statistically resolvable size
/// dependence.
double collapse_quality(std::span<const EntropyCurve> curves, double p_c, double nu);

/// Grid scan plus downhill-simplex refinement of collapse_quality, with
/// parametric-bootstrap error bars.
CollapseFit fit_collapse(std::span<const EntropyCurve> curves, const FitOptions& options = {});

/// True when at least one pair of sizes differs by more than noise
/// (reduced chi-square above 1 + 3 sqrt(2/n)).
bool has_size_dependence(std::span<const EntropyCurve> curves);

struct CollapsedPoint {
  int L = 0;
  double p = 0.0;
  double x = 0.0;
  double y = 0.0;
  double std_err = 0.0;
};

std::vector<CollapsedPoint> collapsed_points(std::span<const EntropyCurve> curves, double p_c,
                                             double nu);

struct CrossingEstimate {
  double p_c_approx = 0.0;  ///< median of all pairwise crossings
  Interval band;            ///< min and max crossing
  std::vector<double> crossings;
};

/// Pairwise crossings of S - ln L by piecewise-linear interpolation. Throws
/// NoCrossingError when no pair intersects.
CrossingEstimate crossing_estimate(std::span<const EntropyCurve> curves);

enum class Regime { volume, critical, area };

std::string to_string(Regime r);

struct RegimeFit {
  Regime regime = Regime::critical;
  double a = 0.0;  ///< coefficient of L
  double b = 0.0;  ///< coefficient of ln L
  double c = 0.0;
  double a_err = 0.0;
  double b_err = 0.0;
};

/// Weighted least-squares fit S(L) = a L + b ln L + c at fixed p. Volume when
/// a > 3 sigma_a, area when |a| <= 2 sigma_a and |b| <= 2 sigma_b, critical
/// otherwise. Needs at least 4 sizes.
RegimeFit classify_regime(std::span<const EntropyCurve> curves, double p);

namespace detail {
/// collapse_quality without the size-dependence guard.
double collapse_residual(std::span<const EntropyCurve> curves, double p_c, double nu,
                         const std::optional<Interval>& p_data_range = std::nullopt);
/// Linear interpolation of (xs, ys) at x; xs ascending, x inside the range.
double interp_linear(std::span<const double> xs, std::span<const double> ys, double x);
}  // namespace detail

}  // namespace mipt
