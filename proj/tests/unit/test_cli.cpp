#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "mipt/analytics.hpp"
#include "mipt/curve_io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status = -1;
  std::string out;  // stdout followed by stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(MIPT_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

nlohmann::json error_line(const std::string& out) {
  const auto pos = out.find("error: ");
  REQUIRE(pos != std::string::npos);
  const auto end = out.find('\n', pos);
  return nlohmann::json::parse(out.substr(pos + 7, end - pos - 7));
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mipt_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli gate-info") {
  auto r = run_cli("gate-info --cartan 1.5707963267948966 1.5707963267948966 0");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["e_p"].get<double>() - 2.0 / 3.0) < 1e-10);
  CHECK(std::abs(j["g_t"].get<double>() - 2.0 / 3.0) < 1e-10);
  CHECK(j["dual_unitary"].get<bool>());

  r = run_cli("gate-info --ep 0.5 --gt 0.5");
  REQUIRE(r.status == 0);
  const auto c = nlohmann::json::parse(r.out)["cartan"];
  for (int k = 0; k < 3; ++k) CHECK(std::abs(c[k].get<double>() - 0.7853981633974483) < 1e-10);

  r = run_cli("gate-info --ep 0.7 --gt 0.5");
  CHECK(r.status != 0);
  CHECK(error_line(r.out)["code"] == "outside_region");
}

TEST_CASE("cli usage errors are machine readable") {
  auto r = run_cli("");
  CHECK(r.status == 2);
  CHECK(error_line(r.out)["code"] == "usage");
  r = run_cli("sweep --spec /nonexistent.json");
  CHECK(r.status == 2);
}

TEST_CASE("cli sweep is byte-identical across worker counts and reruns") {
  const auto dir = scratch("sweep");
  mipt::write_text_file(dir / "spec.json", R"({
    "name": "cnot_small", "gate": {"cartan": [1.5707963267948966, 0, 0]},
    "sizes": [4, 6], "p_grid": [0.0, 0.3, 0.6], "n_traj": 12, "master_seed": 5})");
  const auto spec = (dir / "spec.json").string();
  REQUIRE(run_cli("sweep --spec " + spec + " --out " + (dir / "a").string()).status == 0);
  REQUIRE(run_cli("--workers 3 sweep --spec " + spec + " --out " + (dir / "b").string()).status == 0);
  REQUIRE(run_cli("sweep --spec " + spec + " --out " + (dir / "a2").string()).status == 0);
  for (const char* f : {"curve_L4.csv", "curve_L6.csv"}) {
    const auto a = mipt::read_text_file(dir / "a" / f);
    CHECK(a == mipt::read_text_file(dir / "b" / f));
    CHECK(a == mipt::read_text_file(dir / "a2" / f));
  }
  // The persisted spec records where it was written and is otherwise identical.
  auto spec_without_dir = [&](const char* run) {
    auto j = nlohmann::json::parse(mipt::read_text_file(dir / run / "spec.json"));
    CHECK(j["output_dir"] == (dir / run).string());
    j.erase("output_dir");
    return j;
  };
  CHECK(spec_without_dir("a") == spec_without_dir("b"));
  CHECK(spec_without_dir("a") == spec_without_dir("a2"));
  REQUIRE(run_cli("sweep --spec " + spec + " --seed 6 --out " + (dir / "c").string()).status == 0);
  CHECK(mipt::read_text_file(dir / "a" / "curve_L6.csv") !=
        mipt::read_text_file(dir / "c" / "curve_L6.csv"));
  const auto persisted = nlohmann::json::parse(mipt::read_text_file(dir / "c" / "spec.json"));
  CHECK(persisted["master_seed"] == 6);
  CHECK(persisted["t_factor"] == 2);
}

TEST_CASE("cli collapse needs several sizes") {
  const auto dir = scratch("collapse");
  mipt::EntropyCurve c;
  c.L = 8;
  c.p_values = {0.1, 0.2, 0.3, 0.4};
  c.mean_entropy = {2.0, 1.5, 1.0, 0.5};
  c.std_err = {0.01, 0.01, 0.01, 0.01};
  c.std_dev = c.std_err;
  c.n_traj = 1;
  mipt::write_curve_csv(dir / "curve_L8.csv", c);
  const auto r = run_cli("collapse " + (dir / "curve_L8.csv").string() + " --out " +
                         (dir / "fit").string());
  CHECK(r.status != 0);
  CHECK(error_line(r.out)["code"] == "degenerate_fit");
}

TEST_CASE("cli collapse writes a fit report and collapsed points") {
  const auto dir = scratch("collapse_ok");
  // S = ln L + 1 - tanh((p - 0.3) L^(1/2)), noise-free with small error bars.
  for (int L : {6, 8, 10, 12}) {
    mipt::EntropyCurve c;
    c.L = L;
    c.n_traj = 1;
    for (int i = 0; i <= 20; ++i) {
      const double p = 0.03 * i;
      c.p_values.push_back(p);
      c.mean_entropy.push_back(std::log(L) + 1.0 - std::tanh((p - 0.3) * std::sqrt(L)));
      c.std_err.push_back(0.01);
      c.std_dev.push_back(0.01);
    }
    mipt::write_curve_csv(dir / ("curve_L" + std::to_string(L) + ".csv"), c);
  }
  const auto r = run_cli("collapse --dir " + dir.string() + " --bootstrap 10 --out " +
                         (dir / "fit").string());
  REQUIRE(r.status == 0);
  const auto report = nlohmann::json::parse(mipt::read_text_file(dir / "fit" / "fit.json"));
  CHECK(std::abs(report["fit"]["p_c"].get<double>() - 0.3) < 0.01);
  CHECK(std::abs(report["fit"]["nu"].get<double>() - 2.0) < 0.2);
  CHECK(std::abs(report["crossing"]["p_c_approx"].get<double>() - 0.3) < 0.01);
  CHECK(report["fit"]["sizes_used"].size() == 4);
  const auto pts = mipt::read_text_file(dir / "fit" / "collapsed.csv");
  CHECK(pts.rfind("L,p,x,y,std_err\n", 0) == 0);
}

TEST_CASE("cli analytic") {
  const auto r = run_cli("analytic --N 5 --t 10 --p 0 1");
  REQUIRE(r.status == 0);
  CHECK(r.out == "N,t,p,entropy_nats\n5,10,0," + mipt::format_double(mipt::page_entropy(5, 5)) +
                     "\n5,10,1,0\n");
}

TEST_CASE("cli plane-scan") {
  const auto dir = scratch("plane");
  mipt::write_text_file(dir / "plane.json", R"({
    "n_points": 2, "report_p": 0.2, "report_L": 4,
    "base": {"name": "tiny", "n_traj": 5, "master_seed": 3}})");
  const auto r = run_cli("plane-scan --spec " + (dir / "plane.json").string() + " --out " +
                         (dir / "out").string());
  REQUIRE(r.status == 0);
  const auto rows = mipt::plane_rows_from_csv(mipt::read_text_file(dir / "out" / "plane_scan.csv"));
  CHECK(rows.size() == 2);
}
