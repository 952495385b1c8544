#include "fracpoh/report.hpp"

#include "fracpoh/common.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fracpoh {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "check,s,p,N,lhs,rhs_volume,rhs_boundary,residual_abs,residual_rel,"
         "value,gate,passed\n";
  for (const ReportRow& r : rows) {
    out << r.check << ',' << fmt(r.s) << ',' << fmt(r.p) << ',' << r.resolution
        << ',' << fmt(r.lhs) << ',' << fmt(r.rhs_volume) << ','
        << fmt(r.rhs_boundary) << ',' << fmt(r.residual_abs) << ','
        << fmt(r.residual_rel) << ',' << fmt(r.value) << ',' << fmt(r.gate)
        << ',' << (r.passed ? "1" : "0") << '\n';
  }
  return out.str();
}

std::string trace_csv(const std::vector<TraceRow>& rows, int dim) {
  std::ostringstream out;
  out << (dim == 1 ? "z,Q_z,fit_residual,gamma_fit,r_squared\n"
                   : "z0,z1,Q_z,fit_residual,gamma_fit,r_squared\n");
  for (const TraceRow& r : rows) {
    if (dim == 1)
      out << fmt(r.z0) << ',';
    else
      out << fmt(r.z0) << ',' << fmt(r.z1) << ',';
    out << fmt(r.quotient) << ',' << fmt(r.fit_residual) << ','
        << fmt(r.gamma_fit) << ',' << fmt(r.r_squared) << '\n';
  }
  return out.str();
}

nlohmann::json report_json(const std::vector<ReportRow>& rows,
                           const nlohmann::json& config_echo) {
  nlohmann::json doc;
  doc["config"] = config_echo;
  doc["generated_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  nlohmann::json arr = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    nlohmann::json j{{"check", r.check},
                     {"s", r.s},
                     {"N", r.resolution},
                     {"lhs", r.lhs},
                     {"rhs_volume", r.rhs_volume},
                     {"rhs_boundary", r.rhs_boundary},
                     {"residual_abs", r.residual_abs},
                     {"residual_rel", r.residual_rel},
                     {"value", r.value},
                     {"gate", r.gate},
                     {"passed", r.passed},
                     {"wall_ms", r.wall_ms}};
    if (!std::isnan(r.p)) j["p"] = r.p;
    if (!r.diagnostics.is_null()) j["diagnostics"] = r.diagnostics;
    arr.push_back(std::move(j));
  }
  doc["rows"] = std::move(arr);
  return doc;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + tmp);
    out << body;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fracpoh
