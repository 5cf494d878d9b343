#include "mipt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "mipt/analytics.hpp"
#include "mipt/circuit.hpp"
#include "mipt/errors.hpp"
#include "mipt/rng.hpp"

namespace mipt {

using nlohmann::json;

namespace {

constexpr double kFlagTol = 1e-10;
constexpr std::uint64_t kPlaneSamplerStream = 0x706c616e65ULL;

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ParseError(std::string("unknown field '") + key + "' in " + what);
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

json gate_to_json(const GateSpec& g) {
  json j = json::object();
  if (g.cartan) j["cartan"] = {g.cartan->c1, g.cartan->c2, g.cartan->c3};
  if (g.e_p) j["e_p"] = *g.e_p;
  if (g.g_t) j["g_t"] = *g.g_t;
  return j;
}

GateSpec gate_from_json(const json& j) {
  reject_unknown(j, {"cartan", "e_p", "g_t"}, "gate");
  GateSpec g;
  if (j.contains("cartan")) {
    std::vector<double> c;
    read_field(j, "cartan", c);
    if (c.size() != 3) throw ParseError("gate.cartan must hold three numbers");
    g.cartan = CartanCoeffs{c[0], c[1], c[2]};
  }
  if (j.contains("e_p")) {
    double v = 0.0;
    read_field(j, "e_p", v);
    g.e_p = v;
  }
  if (j.contains("g_t")) {
    double v = 0.0;
    read_field(j, "g_t", v);
    g.g_t = v;
  }
  return g;
}

json experiment_to_json(const ExperimentSpec& s) {
  return json{{"name", s.name},
              {"gate", gate_to_json(s.gate)},
              {"sizes", s.sizes},
              {"p_grid", s.p_grid},
              {"n_traj", s.n_traj},
              {"t_steps", s.t_steps},
              {"t_factor", s.t_factor},
              {"master_seed", s.master_seed},
              {"output_dir", s.output_dir}};
}

ExperimentSpec experiment_from_json(const json& j) {
  reject_unknown(j,
                 {"name", "gate", "sizes", "p_grid", "n_traj", "t_steps", "t_factor",
                  "master_seed", "output_dir"},
                 "experiment spec");
  ExperimentSpec s;
  read_field(j, "name", s.name);
  if (j.contains("gate")) s.gate = gate_from_json(j.at("gate"));
  read_field(j, "sizes", s.sizes);
  read_field(j, "p_grid", s.p_grid);
  read_field(j, "n_traj", s.n_traj);
  read_field(j, "t_steps", s.t_steps);
  read_field(j, "t_factor", s.t_factor);
  read_field(j, "master_seed", s.master_seed);
  read_field(j, "output_dir", s.output_dir);
  return s;
}

json invariants_json(const GateInvariants& g) {
  return json{{"e_p", g.e_p}, {"g_t", g.g_t}, {"E_U", g.E_U}, {"E_US", g.E_US}};
}

json fit_json(const CollapseFit& f) {
  return json{{"p_c", f.p_c},         {"p_c_err", f.p_c_err},   {"nu", f.nu},
              {"nu_err", f.nu_err},   {"quality", f.quality},   {"sizes_used", f.sizes_used},
              {"converged", f.converged}, {"n_bootstrap", f.n_bootstrap}};
}

json fit_options_json(const FitOptions& o) {
  json j{{"p_c_range", {o.p_c_range.lo, o.p_c_range.hi}},
         {"nu_range", {o.nu_range.lo, o.nu_range.hi}},
         {"grid_p_c", o.grid_p_c},
         {"grid_nu", o.grid_nu},
         {"n_bootstrap", o.n_bootstrap},
         {"seed", o.seed}};
  if (o.p_data_range) j["p_data_range"] = {o.p_data_range->lo, o.p_data_range->hi};
  return j;
}

Interval interval_from(const json& j, const char* key) {
  std::vector<double> v;
  read_field(j, key, v);
  if (v.size() != 2) throw ParseError(std::string(key) + " must hold two numbers");
  return {v[0], v[1]};
}

FitOptions fit_options_from_json(const json& j) {
  reject_unknown(j,
                 {"p_c_range", "nu_range", "grid_p_c", "grid_nu", "n_bootstrap", "seed",
                  "p_data_range"},
                 "fit options");
  FitOptions o;
  if (j.contains("p_c_range")) o.p_c_range = interval_from(j, "p_c_range");
  if (j.contains("nu_range")) o.nu_range = interval_from(j, "nu_range");
  read_field(j, "grid_p_c", o.grid_p_c);
  read_field(j, "grid_nu", o.grid_nu);
  read_field(j, "n_bootstrap", o.n_bootstrap);
  read_field(j, "seed", o.seed);
  if (j.contains("p_data_range")) o.p_data_range = interval_from(j, "p_data_range");
  return o;
}

bool same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  return a == b;
}

std::optional<EntropyCurve> load_matching(const std::filesystem::path& path,
                                          const ExperimentSpec& spec, int L) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    EntropyCurve c = read_curve_csv(path);
    if (c.L == L && c.n_traj == spec.n_traj && c.master_seed == spec.master_seed &&
        same_grid(c.p_values, spec.p_grid)) {
      return c;
    }
  } catch (const Error&) {
    // An unreadable file is recomputed.
  }
  return std::nullopt;
}

}  // namespace

CartanCoeffs GateSpec::resolve() const {
  const bool have_inv = e_p.has_value() || g_t.has_value();
  if (cartan.has_value() == have_inv) {
    throw DomainError("gate needs either 'cartan' or both 'e_p' and 'g_t'");
  }
  if (cartan) {
    validate_weyl(*cartan);
    return *cartan;
  }
  if (!e_p || !g_t) throw DomainError("gate needs both 'e_p' and 'g_t'");
  return cartan_from_invariants(*e_p, *g_t);
}

std::vector<double> default_p_grid() {
  std::vector<double> grid(21);
  for (int i = 0; i < 21; ++i) grid[i] = (3 * i) / 100.0;
  return grid;
}

void ExperimentSpec::validate() const {
  gate.resolve();
  if (sizes.empty()) throw DomainError("experiment needs at least one size");
  std::set<int> seen;
  for (int L : sizes) {
    if (L < 4 || L % 2 != 0) throw DomainError(fmt::format("size {} must be even and >= 4", L));
    if (!seen.insert(L).second) throw DomainError(fmt::format("size {} listed twice", L));
  }
  if (p_grid.empty()) throw DomainError("p grid is empty");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] >= 0.0 && p_grid[i] <= 1.0)) throw DomainError("p values must lie in [0, 1]");
    if (i > 0 && !(p_grid[i] > p_grid[i - 1])) {
      throw DomainError("p grid must be strictly ascending");
    }
  }
  if (n_traj < 1) throw DomainError("n_traj must be at least 1");
  if (t_steps < 0) throw DomainError("t_steps must be non-negative");
  if (t_steps == 0 && t_factor < 1) throw DomainError("t_factor must be at least 1");
}

ExperimentSpec spec_from_json(const std::string& text) {
  ExperimentSpec s = experiment_from_json(parse_json(text));
  s.validate();
  return s;
}

std::string spec_to_json(const ExperimentSpec& spec) {
  return experiment_to_json(spec).dump(2) + "\n";
}

std::uint64_t curve_seed(std::uint64_t master_seed, int L) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(L)});
}

std::filesystem::path curve_path(const std::filesystem::path& dir, int L) {
  return dir / fmt::format("curve_L{}.csv", L);
}

EntropyCurve run_size(const ExperimentSpec& spec, int L, int workers) {
  SweepRequest req;
  req.L = L;
  req.cartan = spec.gate.resolve();
  req.p_grid = spec.p_grid;
  req.n_traj = spec.n_traj;
  req.t_steps = spec.steps_for(L);
  req.master_seed = curve_seed(spec.master_seed, L);
  req.workers = workers;
  EntropyCurve c = sweep(req);
  // The file records the experiment seed; the per-size seed follows from it.
  c.master_seed = spec.master_seed;
  return c;
}

std::vector<EntropyCurve> run_experiment(const ExperimentSpec& spec,
                                         const std::filesystem::path& out_dir, int workers,
                                         bool reuse_existing) {
  spec.validate();
  const auto spec_file = out_dir / "spec.json";
  const std::string spec_text = spec_to_json(spec);
  bool reusable = false;
  if (reuse_existing && std::filesystem::exists(spec_file)) {
    try {
      // Where the data lives does not change the data.
      auto stored = spec_from_json(read_text_file(spec_file));
      stored.output_dir = spec.output_dir;
      reusable = spec_to_json(stored) == spec_text;
    } catch (const Error&) {
      reusable = false;
    }
  }
  write_text_file(spec_file, spec_text);

  std::vector<EntropyCurve> curves;
  for (int L : spec.sizes) {
    const auto path = curve_path(out_dir, L);
    if (reusable) {
      if (auto cached = load_matching(path, spec, L)) {
        curves.push_back(std::move(*cached));
        continue;
      }
    }
    curves.push_back(run_size(spec, L, workers));
    write_curve_csv(path, curves.back());
  }
  return curves;
}

GateReport gate_info(const GateSpec& gate) {
  GateReport r;
  r.cartan = gate.resolve();
  const TwoQubitGate g = cartan_gate(r.cartan);
  r.from_gate = invariants_from_gate(g);
  r.from_cartan = invariants_from_cartan(r.cartan);
  r.schmidt = operator_schmidt(g);
  r.dual_unitary = std::abs(r.from_gate.E_U - kSwapOperatorEntanglement) < kFlagTol;
  r.t_dual = std::abs(r.from_gate.E_US - kSwapOperatorEntanglement) < kFlagTol;
  return r;
}

std::string gate_report_json(const GateReport& r) {
  json j{{"cartan", {r.cartan.c1, r.cartan.c2, r.cartan.c3}},
         {"e_p", r.from_gate.e_p},
         {"g_t", r.from_gate.g_t},
         {"E_U", r.from_gate.E_U},
         {"E_US", r.from_gate.E_US},
         {"invariants_closed_form", invariants_json(r.from_cartan)},
         {"schmidt", r.schmidt.lambdas},
         {"dual_unitary", r.dual_unitary},
         {"t_dual", r.t_dual}};
  return j.dump(2) + "\n";
}

CollapseReport run_collapse(const std::vector<EntropyCurve>& curves, const FitOptions& options) {
  CollapseReport r;
  r.fit = fit_collapse(curves, options);
  try {
    r.crossing = crossing_estimate(curves);
  } catch (const NoCrossingError& e) {
    r.crossing_error = e.what();
  }
  r.points = collapsed_points(curves, r.fit.p_c, r.fit.nu);
  return r;
}

std::string collapse_report_json(const CollapseReport& r) {
  json j{{"fit", fit_json(r.fit)}};
  if (r.crossing) {
    j["crossing"] = {{"p_c_approx", r.crossing->p_c_approx},
                     {"band", {r.crossing->band.lo, r.crossing->band.hi}},
                     {"crossings", r.crossing->crossings}};
  } else {
    j["crossing"] = nullptr;
    j["crossing_error"] = r.crossing_error;
  }
  return j.dump(2) + "\n";
}

void PlaneScanSpec::validate() const {
  if (points.empty() && n_points < 1) throw DomainError("n_points must be at least 1");
  if (!(report_p >= 0.0 && report_p <= 1.0)) throw DomainError("report_p must lie in [0, 1]");
  if (report_L < 4 || report_L % 2 != 0) throw DomainError("report_L must be even and >= 4");
  if (base.n_traj < 1) throw DomainError("n_traj must be at least 1");
  if (fit) {
    if (std::find(base.sizes.begin(), base.sizes.end(), report_L) == base.sizes.end()) {
      throw DomainError("report_L must be one of the sizes when fitting");
    }
    if (std::find(base.p_grid.begin(), base.p_grid.end(), report_p) == base.p_grid.end()) {
      throw DomainError("report_p must be on the p grid when fitting");
    }
  }
}

PlaneScanSpec plane_spec_from_json(const std::string& text) {
  const json j = parse_json(text);
  reject_unknown(j, {"n_points", "report_p", "report_L", "fit", "base", "points", "fit_options"},
                 "plane-scan spec");
  PlaneScanSpec s;
  read_field(j, "n_points", s.n_points);
  read_field(j, "report_p", s.report_p);
  read_field(j, "report_L", s.report_L);
  read_field(j, "fit", s.fit);
  if (j.contains("base")) s.base = experiment_from_json(j.at("base"));
  if (j.contains("points")) {
    std::vector<std::vector<double>> pts;
    read_field(j, "points", pts);
    for (const auto& pt : pts) {
      if (pt.size() != 2) throw ParseError("each plane point must be [e_p, g_t]");
      s.points.emplace_back(pt[0], pt[1]);
    }
  }
  if (j.contains("fit_options")) s.fit_options = fit_options_from_json(j.at("fit_options"));
  s.validate();
  return s;
}

std::string plane_spec_to_json(const PlaneScanSpec& s) {
  json base = experiment_to_json(s.base);
  base.erase("gate");
  json pts = json::array();
  for (const auto& [e, g] : s.points) pts.push_back({e, g});
  json j{{"n_points", s.n_points}, {"report_p", s.report_p},
         {"report_L", s.report_L}, {"fit", s.fit},
         {"base", base},           {"points", pts},
         {"fit_options", fit_options_json(s.fit_options)}};
  return j.dump(2) + "\n";
}

std::vector<std::pair<double, double>> sample_plane_points(int n_points, std::uint64_t seed) {
  if (n_points < 0) throw DomainError("n_points must be non-negative");
  Rng rng(derive_seed(seed, {kPlaneSamplerStream}));
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(n_points));
  while (static_cast<int>(out.size()) < n_points) {
    const double e = kMaxEntanglingPower * rng.uniform();
    const double g = rng.uniform();
    if (try_cartan_from_invariants(e, g)) out.emplace_back(e, g);
  }
  return out;
}

std::vector<PlaneRow> run_plane_scan(const PlaneScanSpec& spec,
                                     const std::filesystem::path& out_dir, int workers) {
  spec.validate();
  write_text_file(out_dir / "plane_spec.json", plane_spec_to_json(spec));
  const auto pts =
      spec.points.empty() ? sample_plane_points(spec.n_points, spec.base.master_seed) : spec.points;

  std::vector<PlaneRow> rows;
  rows.reserve(pts.size());
  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    const auto [e_p, g_t] = pts[idx];
    ExperimentSpec point = spec.base;
    point.name = fmt::format("{}_point{}", spec.base.name, idx);
    point.gate = GateSpec::from_invariants(e_p, g_t);
    point.master_seed = derive_seed(spec.base.master_seed, {idx});
    if (!spec.fit) {
      point.sizes = {spec.report_L};
      point.p_grid = {spec.report_p};
    }
    const auto point_file = out_dir / "points" / fmt::format("point_{:04d}.json", idx);

    if (std::filesystem::exists(point_file)) {
      try {
        const json done = parse_json(read_text_file(point_file));
        if (done.at("seed").get<std::uint64_t>() == point.master_seed &&
            done.at("spec").dump() == experiment_to_json(point).dump()) {
          auto parsed = plane_rows_from_csv(done.at("row").get<std::string>());
          if (parsed.size() == 1) {
            rows.push_back(parsed.front());
            continue;
          }
        }
      } catch (const std::exception&) {
        // Stale or corrupt; recompute.
      }
    }

    const auto curves = run_experiment(point, out_dir / "points" / fmt::format("p{:04d}", idx),
                                       workers, true);
    PlaneRow row;
    row.idx = static_cast<int>(idx);
    row.e_p = e_p;
    row.g_t = g_t;
    row.cartan = point.gate.resolve();
    row.p = spec.report_p;
    for (const auto& c : curves) {
      if (c.L != spec.report_L) continue;
      const auto it = std::find(c.p_values.begin(), c.p_values.end(), spec.report_p);
      const auto k = static_cast<std::size_t>(it - c.p_values.begin());
      row.mean_entropy = c.mean_entropy[k];
      row.std_err = c.std_err[k];
    }
    if (spec.fit) {
      FitOptions opt = spec.fit_options;
      opt.workers = workers;
      try {
        row.fit = fit_collapse(curves, opt);
      } catch (const DegenerateFitError&) {
        // Points whose curves cannot be collapsed get NaN parameters.
        const double nan = std::nan("");
        row.fit = CollapseFit{nan, nan, nan, nan, nan, {}, false, 0};
      }
    }
    write_text_file(point_file, json{{"seed", point.master_seed},
                                     {"spec", experiment_to_json(point)},
                                     {"row", plane_rows_to_csv({row})}}
                                    .dump(2));
    rows.push_back(row);
  }
  write_text_file(out_dir / "plane_scan.csv", plane_rows_to_csv(rows));
  return rows;
}

std::string analytic_csv(int N, const std::vector<int>& t_values,
                         const std::vector<double>& p_grid) {
  std::string out = "N,t,p,entropy_nats\n";
  for (int t : t_values) {
    for (double p : p_grid) {
      const double s = measurement_only_entropy({N, p, t});
      out += fmt::format("{},{},{},{}\n", N, t, format_double(p), format_double(s));
    }
  }
  return out;
}

}  // namespace mipt
