// mipt: command-line driver for gate reports, entropy sweeps, data collapse,
// plane scans and closed-form measurement-only curves.
//
// Every failure prints one line `error: {"code": ..., "message": ...}` to
// stderr and exits with status 1 (2 for usage errors).

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "mipt/circuit.hpp"
#include "mipt/curve_io.hpp"
#include "mipt/errors.hpp"
#include "mipt/experiment.hpp"

namespace fs = std::filesystem;

namespace {

int report_error(const std::string& code, const std::string& message, int status) {
  const nlohmann::json j{{"code", code}, {"message", message}};
  std::cerr << "error: " << j.dump() << '\n';
  return status;
}

void emit(const std::string& text, const std::optional<fs::path>& out) {
  if (out) {
    mipt::write_text_file(*out, text);
  } else {
    std::cout << text;
  }
}

std::vector<fs::path> curve_files_in(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw mipt::IoError("not a directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("curve_L", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid brick-wall circuit simulator and scaling analysis"};
  app.require_subcommand(1);

  int workers = mipt::workers_from_environment();
  app.add_option("--workers", workers, "Worker threads (default: MIPT_WORKERS or 1)")
      ->check(CLI::PositiveNumber);

  // gate-info
  auto* gi = app.add_subcommand("gate-info", "Report invariants of a Cartan core");
  std::vector<double> gi_cartan;
  std::optional<double> gi_ep, gi_gt;
  std::optional<fs::path> gi_out;
  gi->add_option("--cartan", gi_cartan, "c1 c2 c3")->expected(3);
  gi->add_option("--ep", gi_ep, "entangling power");
  gi->add_option("--gt", gi_gt, "gate typicality");
  gi->add_option("--out", gi_out, "Write the JSON report here instead of stdout");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Entropy versus p for each size of an experiment");
  fs::path sw_spec;
  std::optional<fs::path> sw_out;
  std::optional<std::uint64_t> sw_seed;
  bool sw_reuse = false;
  sw->add_option("--spec", sw_spec, "Experiment JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", sw_out, "Output directory (overrides output_dir)");
  sw->add_option("--seed", sw_seed, "Master seed override");
  sw->add_flag("--reuse", sw_reuse, "Keep curve files that already match the experiment");

  // collapse
  auto* co = app.add_subcommand("collapse", "Fit p_c and nu by finite-size data collapse");
  std::vector<fs::path> co_files;
  std::optional<fs::path> co_dir;
  fs::path co_out = "collapse";
  std::vector<double> co_pc_range{0.05, 0.6}, co_nu_range{0.5, 4.0}, co_window;
  int co_boot = 100;
  std::uint64_t co_seed = 0;
  co->add_option("curves", co_files, "Curve CSV files")->check(CLI::ExistingFile);
  co->add_option("--dir", co_dir, "Use every curve_L*.csv in this directory");
  co->add_option("--out", co_out, "Directory for fit.json and collapsed.csv");
  co->add_option("--p-c-range", co_pc_range, "lo hi")->expected(2);
  co->add_option("--nu-range", co_nu_range, "lo hi")->expected(2);
  co->add_option("--p-window", co_window, "Only fit points with p in [lo, hi]")->expected(2);
  co->add_option("--bootstrap", co_boot, "Bootstrap resamples")->check(CLI::NonNegativeNumber);
  co->add_option("--seed", co_seed, "Bootstrap seed");

  // plane-scan
  auto* ps = app.add_subcommand("plane-scan", "Entropy (and optionally p_c, nu) over the plane");
  fs::path ps_spec;
  std::optional<fs::path> ps_out;
  std::optional<int> ps_n;
  std::optional<std::uint64_t> ps_seed;
  ps->add_option("--spec", ps_spec, "Plane-scan JSON")->required()->check(CLI::ExistingFile);
  ps->add_option("--out", ps_out, "Output directory (overrides base.output_dir)");
  ps->add_option("--n-points", ps_n, "Number of sampled points");
  ps->add_option("--seed", ps_seed, "Master seed override");

  // analytic
  auto* an = app.add_subcommand("analytic", "Closed-form measurement-only entropy curve");
  int an_N = 5;
  std::vector<int> an_t{10};
  std::vector<double> an_p = mipt::default_p_grid();
  std::optional<fs::path> an_out;
  an->add_option("--N", an_N, "Qubits per half")->check(CLI::PositiveNumber);
  an->add_option("--t", an_t, "Measurement layers (repeatable)");
  an->add_option("--p", an_p, "p values (default 21 points on [0, 0.6])");
  an->add_option("--out", an_out, "Write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    if (*gi) {
      mipt::GateSpec gate;
      if (!gi_cartan.empty()) gate.cartan = mipt::CartanCoeffs{gi_cartan[0], gi_cartan[1], gi_cartan[2]};
      gate.e_p = gi_ep;
      gate.g_t = gi_gt;
      emit(mipt::gate_report_json(mipt::gate_info(gate)), gi_out);
    } else if (*sw) {
      auto spec = mipt::spec_from_json(mipt::read_text_file(sw_spec));
      if (sw_seed) spec.master_seed = *sw_seed;
      const fs::path dir = sw_out ? *sw_out : fs::path(spec.output_dir);
      spec.output_dir = dir.string();
      const auto curves = mipt::run_experiment(spec, dir, workers, sw_reuse);
      for (const auto& c : curves) std::cout << mipt::curve_path(dir, c.L).string() << '\n';
    } else if (*co) {
      std::vector<fs::path> files = co_files;
      if (co_dir) {
        const auto more = curve_files_in(*co_dir);
        files.insert(files.end(), more.begin(), more.end());
      }
      std::vector<mipt::EntropyCurve> curves;
      for (const auto& f : files) curves.push_back(mipt::read_curve_csv(f));
      mipt::FitOptions opt;
      opt.p_c_range = {co_pc_range[0], co_pc_range[1]};
      opt.nu_range = {co_nu_range[0], co_nu_range[1]};
      if (!co_window.empty()) opt.p_data_range = mipt::Interval{co_window[0], co_window[1]};
      opt.n_bootstrap = co_boot;
      opt.seed = co_seed;
      opt.workers = workers;
      const auto report = mipt::run_collapse(curves, opt);
      const std::string text = mipt::collapse_report_json(report);
      mipt::write_text_file(co_out / "fit.json", text);
      mipt::write_text_file(co_out / "collapsed.csv", mipt::collapsed_points_to_csv(report.points));
      std::cout << text;
    } else if (*ps) {
      auto spec = mipt::plane_spec_from_json(mipt::read_text_file(ps_spec));
      if (ps_n) spec.n_points = *ps_n;
      if (ps_seed) spec.base.master_seed = *ps_seed;
      spec.validate();
      const fs::path dir = ps_out ? *ps_out : fs::path(spec.base.output_dir);
      spec.base.output_dir = dir.string();
      const auto rows = mipt::run_plane_scan(spec, dir, workers);
      std::cout << (dir / "plane_scan.csv").string() << " (" << rows.size() << " points)\n";
    } else if (*an) {
      emit(mipt::analytic_csv(an_N, an_t, an_p), an_out);
    }
  } catch (const mipt::Error& e) {
    return report_error(e.code(), e.what(), 1);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
