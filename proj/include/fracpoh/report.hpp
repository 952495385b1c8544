#pragma once

#include <json.hpp>

#include <limits>
#include <string>
#include <vector>

namespace fracpoh {

// One row per (check, sweep-point); the CSV body is byte-identical across
// runs of the same config and seed (wall times live in the JSON mirror only).
struct ReportRow {
  std::string check;
  double s = 0.0;
  double p = 0.0;          // NaN when not applicable -> empty CSV cell
  int resolution = 0;      // N
  double lhs = 0.0;
  double rhs_volume = 0.0;
  double rhs_boundary = 0.0;
  double residual_abs = 0.0;
  double residual_rel = 0.0;
  double value = 0.0;      // scalar result for non-identity checks
  double gate = 0.0;
  bool passed = true;
  double wall_ms = 0.0;    // JSON only
  nlohmann::json diagnostics;  // JSON only
};

struct TraceRow {
  double z0 = 0.0, z1 = 0.0;
  double quotient = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
  double gamma_fit = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
};

std::string report_csv(const std::vector<ReportRow>& rows);
std::string trace_csv(const std::vector<TraceRow>& rows, int dim);
nlohmann::json report_json(const std::vector<ReportRow>& rows,
                           const nlohmann::json& config_echo);

// Atomic write (temp + rename).
void write_text_file(const std::string& path, const std::string& body);

}  // namespace fracpoh
