// fracpoh: config-driven experiments for nonlocal Dirichlet problems.
//
// Subcommands:
//   run   <config>                 solve + checks, write reports
//   sweep <config>                 run per sweep value, add order summary
//   check <solution> --check NAME  re-run one check on a stored solution
//
// Exit codes: 0 all gates pass, 1 a gate failed, 2 invalid config/arguments,
// 3 runtime failure.

#include "fracpoh/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

int finish(const fracpoh::RunOutcome& outcome, const fracpoh::ExperimentConfig& cfg,
           const std::string& out_dir) {
  fracpoh::write_outputs(outcome, cfg, out_dir);
  for (const auto& row : outcome.rows) {
    std::cout << (row.passed ? "[PASS] " : "[FAIL] ") << row.check;
    if (std::isfinite(row.residual_rel))
      std::cout << "  residual_rel=" << row.residual_rel;
    else if (std::isfinite(row.value))
      std::cout << "  value=" << row.value;
    std::cout << "  gate=" << row.gate << "\n";
  }
  return outcome.all_passed ? 0 : 1;
}

int apply_overrides(fracpoh::ExperimentConfig& cfg, int threads,
                    long long seed, bool seed_set) {
  if (threads > 0) {
    cfg.threads = threads;
  } else if (const char* env = std::getenv("FRACPOH_THREADS")) {
    cfg.threads = std::max(1, std::atoi(env));
  }
  if (seed_set) cfg.seed = static_cast<unsigned long long>(seed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlocal Dirichlet solver and identity verifier"};
  app.require_subcommand(1);

  std::string config_path, out_dir, solution_path, check_name;
  int threads = 0;
  long long seed = 0;
  bool seed_set = false;
  double check_tol = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "output directory (overrides config)");
    cmd->add_option("--threads", threads, "worker threads (or FRACPOH_THREADS)");
    cmd->add_option("--seed", seed, "seed for randomized probe sampling")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run a config");
  cmd_run->add_option("config", config_path, "experiment config (JSON)")->required();
  add_common(cmd_run);

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run a config per sweep value");
  cmd_sweep->add_option("config", config_path, "experiment config (JSON)")->required();
  add_common(cmd_sweep);

  CLI::App* cmd_check = app.add_subcommand("check", "re-run a check on a stored solution");
  cmd_check->add_option("solution", solution_path, "solution file")->required();
  cmd_check->add_option("--check", check_name, "check name")->required();
  cmd_check->add_option("--tol", check_tol, "gate override");
  add_common(cmd_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_run->parsed() || cmd_sweep->parsed()) {
      fracpoh::ExperimentConfig cfg = fracpoh::ExperimentConfig::load(config_path);
      apply_overrides(cfg, threads, seed, seed_set);
      fracpoh::RunOutcome outcome =
          cmd_run->parsed() ? fracpoh::run(cfg) : fracpoh::sweep(cfg);
      return finish(outcome, cfg, out_dir);
    }
    fracpoh::RunOutcome outcome =
        fracpoh::check_solution(solution_path, check_name, check_tol);
    for (const auto& row : outcome.rows)
      std::cout << (row.passed ? "[PASS] " : "[FAIL] ") << row.check << "\n";
    if (!out_dir.empty()) {
      fracpoh::LoadedSolution loaded = fracpoh::load_solution(solution_path);
      fracpoh::write_outputs(outcome, loaded.spec, out_dir);
    }
    return outcome.all_passed ? 0 : 1;
  } catch (const fracpoh::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const fracpoh::parameter_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
