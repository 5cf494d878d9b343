#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mipt/curve.hpp"
#include "mipt/gates.hpp"
#include "mipt/scaling.hpp"

namespace mipt {

/// 17 significant digits; round-trips every finite double.
std::string format_double(double x);

inline constexpr const char* kCurveHeader = "L,p,mean_entropy_nats,std_dev,std_err,n_traj,master_seed";
inline constexpr const char* kPlaneHeader = "idx,e_p,g_t,c1,c2,c3,p,mean_entropy_nats,std_err";
inline constexpr const char* kPlaneFitHeader = ",p_c,p_c_err,nu,nu_err";

std::string curve_to_csv(const EntropyCurve& curve);
EntropyCurve curve_from_csv(const std::string& text);

void write_curve_csv(const std::filesystem::path& path, const EntropyCurve& curve);
EntropyCurve read_curve_csv(const std::filesystem::path& path);

struct PlaneRow {
  int idx = 0;
  double e_p = 0.0;
  double g_t = 0.0;
  CartanCoeffs cartan;
  double p = 0.0;
  double mean_entropy = 0.0;
  double std_err = 0.0;
  std::optional<CollapseFit> fit;
};

std::string plane_rows_to_csv(const std::vector<PlaneRow>& rows);
std::vector<PlaneRow> plane_rows_from_csv(const std::string& text);

std::string collapsed_points_to_csv(const std::vector<CollapsedPoint>& points);

/// Writes `text` atomically (temporary file, then rename).
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace mipt
