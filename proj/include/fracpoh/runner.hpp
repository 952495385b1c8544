#pragma once

#include "fracpoh/config.hpp"
#include "fracpoh/report.hpp"
#include "fracpoh/serialize.hpp"

#include <string>
#include <vector>

namespace fracpoh {

struct RunOutcome {
  std::vector<ReportRow> rows;
  std::vector<TraceRow> trace_rows;
  bool all_passed = true;
  std::shared_ptr<GridFunction> solution;  // set when the pipeline solved
  nlohmann::json diagnostics;
};

// Build geometry, assemble, solve (when a check needs the solution), run the
// requested checks.
RunOutcome run(const ExperimentConfig& cfg);

// Run once per sweep value and append observed-order summary rows.
RunOutcome sweep(const ExperimentConfig& cfg);

// reports.csv + reports.json (+ trace.csv, solution.bin) under out_dir.
void write_outputs(const RunOutcome& outcome, const ExperimentConfig& cfg,
                   const std::string& out_dir);

// Re-run a single check against a stored solution file.
RunOutcome check_solution(const std::string& path, const std::string& check,
                          double tol = 0.0);

double default_check_tolerance(const std::string& check, int dim);

}  // namespace fracpoh
