#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mipt/curve.hpp"
#include "mipt/curve_io.hpp"
#include "mipt/gates.hpp"
#include "mipt/scaling.hpp"

namespace mipt {

/// A gate given either by its Cartan coefficients or by (e_p, g_t).
struct GateSpec {
  std::optional<CartanCoeffs> cartan;
  std::optional<double> e_p;
  std::optional<double> g_t;

  static GateSpec from_cartan(const CartanCoeffs& c) { return {c, std::nullopt, std::nullopt}; }
  static GateSpec from_invariants(double e_p, double g_t) { return {std::nullopt, e_p, g_t}; }

  /// Throws DomainError (neither or both forms given, Weyl ordering) or
  /// OutsideRegionError (infeasible invariants).
  CartanCoeffs resolve() const;
};

/// 21 evenly spaced points on [0, 0.6].
std::vector<double> default_p_grid();

struct ExperimentSpec {
  std::string name = "experiment";
  GateSpec gate;
  std::vector<int> sizes;
  std::vector<double> p_grid = default_p_grid();
  int n_traj = 1500;
  int t_steps = 0;   ///< fixed number of steps for every size when > 0
  int t_factor = 2;  ///< otherwise t = t_factor * L
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";

  int steps_for(int L) const noexcept { return t_steps > 0 ? t_steps : t_factor * L; }
  void validate() const;
};

/// Parses a JSON experiment document. Missing fields take the defaults above;
/// unknown fields are rejected. Throws ParseError or DomainError.
ExperimentSpec spec_from_json(const std::string& text);
/// Serializes with every default written out.
std::string spec_to_json(const ExperimentSpec& spec);

/// Seed of the curve for size L within an experiment.
std::uint64_t curve_seed(std::uint64_t master_seed, int L);

std::filesystem::path curve_path(const std::filesystem::path& dir, int L);

/// Runs the sweep for one size of the experiment.
EntropyCurve run_size(const ExperimentSpec& spec, int L, int workers);

/// Runs every size and writes spec.json plus curve_L{L}.csv into `out_dir`.
/// With `reuse_existing`, a curve file whose parameters match is loaded
/// instead of recomputed, provided the stored spec.json matches `spec` in
/// everything but output_dir.
std::vector<EntropyCurve> run_experiment(const ExperimentSpec& spec,
                                         const std::filesystem::path& out_dir, int workers,
                                         bool reuse_existing = false);

struct GateReport {
  CartanCoeffs cartan;
  GateInvariants from_gate;
  GateInvariants from_cartan;
  SchmidtSpectrum schmidt;
  bool dual_unitary = false;  ///< E(U) = 3/4
  bool t_dual = false;        ///< E(US) = 3/4
};

GateReport gate_info(const GateSpec& gate);
std::string gate_report_json(const GateReport& report);

struct CollapseReport {
  CollapseFit fit;
  std::optional<CrossingEstimate> crossing;
  std::string crossing_error;  ///< set when no crossing exists
  std::vector<CollapsedPoint> points;
};

/// fit_collapse plus crossing_estimate on the same curves.
CollapseReport run_collapse(const std::vector<EntropyCurve>& curves, const FitOptions& options);
std::string collapse_report_json(const CollapseReport& report);

struct PlaneScanSpec {
  int n_points = 614;
  double report_p = 0.2;
  int report_L = 12;
  bool fit = false;
  /// Sizes, p grid, trajectory count and step rule for each point. When
  /// `fit` is false only (report_L, report_p) is simulated.
  ExperimentSpec base;
  /// Explicit (e_p, g_t) points; replaces random sampling when non-empty.
  std::vector<std::pair<double, double>> points;
  FitOptions fit_options;

  void validate() const;
};

PlaneScanSpec plane_spec_from_json(const std::string& text);
std::string plane_spec_to_json(const PlaneScanSpec& spec);

/// Uniform samples of the (e_p, g_t) box [0, 2/3] x [0, 1] kept only when
/// cartan_from_invariants succeeds.
std::vector<std::pair<double, double>> sample_plane_points(int n_points, std::uint64_t seed);

/// Runs (or resumes) a plane scan. Each finished point is stored under
/// out_dir/points/ and skipped on rerun; the table goes to plane_scan.csv.
std::vector<PlaneRow> run_plane_scan(const PlaneScanSpec& spec,
                                     const std::filesystem::path& out_dir, int workers);

/// CSV with columns N,t,p,entropy_nats, one row per (t, p).
std::string analytic_csv(int N, const std::vector<int>& t_values,
                         const std::vector<double>& p_grid);

}  // namespace mipt
