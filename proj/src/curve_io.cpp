#include "mipt/curve_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mipt/errors.hpp"

namespace mipt {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& field, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(std::string("cannot parse ") + what + " from '" + field + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string curve_to_csv(const EntropyCurve& curve) {
  curve.validate();
  std::string out = kCurveHeader;
  out += '\n';
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double sd = curve.std_dev.empty() ? 0.0 : curve.std_dev[k];
    out += fmt::format("{},{},{},{},{},{},{}\n", curve.L, format_double(curve.p_values[k]),
                       format_double(curve.mean_entropy[k]), format_double(sd),
                       format_double(curve.std_err[k]), curve.n_traj, curve.master_seed);
  }
  return out;
}

EntropyCurve curve_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kCurveHeader) {
    throw ParseError("curve CSV must start with the header '" + std::string(kCurveHeader) + "'");
  }
  if (lines.size() < 2) throw ParseError("curve CSV has no data rows");
  EntropyCurve c;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 7) {
      throw ParseError("curve CSV row " + std::to_string(i) + " has " + std::to_string(f.size()) +
                       " fields, expected 7");
    }
    const int L = parse_number<int>(f[0], "L");
    const int n_traj = parse_number<int>(f[5], "n_traj");
    const auto seed = parse_number<std::uint64_t>(f[6], "master_seed");
    if (i == 1) {
      c.L = L;
      c.n_traj = n_traj;
      c.master_seed = seed;
    } else if (L != c.L || n_traj != c.n_traj || seed != c.master_seed) {
      throw ParseError("curve CSV mixes different L, n_traj or master_seed");
    }
    c.p_values.push_back(parse_number<double>(f[1], "p"));
    c.mean_entropy.push_back(parse_number<double>(f[2], "mean_entropy_nats"));
    c.std_dev.push_back(parse_number<double>(f[3], "std_dev"));
    c.std_err.push_back(parse_number<double>(f[4], "std_err"));
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return c;
}

void write_curve_csv(const std::filesystem::path& path, const EntropyCurve& curve) {
  write_text_file(path, curve_to_csv(curve));
}

EntropyCurve read_curve_csv(const std::filesystem::path& path) {
  return curve_from_csv(read_text_file(path));
}

std::string plane_rows_to_csv(const std::vector<PlaneRow>& rows) {
  const bool with_fit = !rows.empty() && rows.front().fit.has_value();
  std::string out = kPlaneHeader;
  if (with_fit) out += kPlaneFitHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}", r.idx, format_double(r.e_p),
                       format_double(r.g_t), format_double(r.cartan.c1),
                       format_double(r.cartan.c2), format_double(r.cartan.c3),
                       format_double(r.p), format_double(r.mean_entropy),
                       format_double(r.std_err));
    if (with_fit) {
      if (!r.fit) throw DomainError("plane rows mix fitted and unfitted points");
      out += fmt::format(",{},{},{},{}", format_double(r.fit->p_c), format_double(r.fit->p_c_err),
                         format_double(r.fit->nu), format_double(r.fit->nu_err));
    }
    out += '\n';
  }
  return out;
}

std::vector<PlaneRow> plane_rows_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("plane-scan CSV is empty");
  bool with_fit = false;
  if (lines.front() == std::string(kPlaneHeader) + kPlaneFitHeader) {
    with_fit = true;
  } else if (lines.front() != kPlaneHeader) {
    throw ParseError("unexpected plane-scan CSV header");
  }
  const std::size_t n_fields = with_fit ? 13 : 9;
  std::vector<PlaneRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != n_fields) throw ParseError("plane-scan CSV row has the wrong field count");
    PlaneRow r;
    r.idx = parse_number<int>(f[0], "idx");
    r.e_p = parse_number<double>(f[1], "e_p");
    r.g_t = parse_number<double>(f[2], "g_t");
    r.cartan = {parse_number<double>(f[3], "c1"), parse_number<double>(f[4], "c2"),
                parse_number<double>(f[5], "c3")};
    r.p = parse_number<double>(f[6], "p");
    r.mean_entropy = parse_number<double>(f[7], "mean_entropy_nats");
    r.std_err = parse_number<double>(f[8], "std_err");
    if (with_fit) {
      CollapseFit fit;
      fit.p_c = parse_number<double>(f[9], "p_c");
      fit.p_c_err = parse_number<double>(f[10], "p_c_err");
      fit.nu = parse_number<double>(f[11], "nu");
      fit.nu_err = parse_number<double>(f[12], "nu_err");
      r.fit = fit;
    }
    rows.push_back(r);
  }
  return rows;
}

std::string collapsed_points_to_csv(const std::vector<CollapsedPoint>& points) {
  std::string out = "L,p,x,y,std_err\n";
  for (const auto& pt : points) {
    out += fmt::format("{},{},{},{},{}\n", pt.L, format_double(pt.p), format_double(pt.x),
                       format_double(pt.y), format_double(pt.std_err));
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mipt
