#include "fracpoh/runner.hpp"

#include "fracpoh/pohozaev.hpp"
#include "fracpoh/quadrature.hpp"
#include "fracpoh/solve.hpp"
#include "fracpoh/trace.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <set>

namespace fracpoh {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool check_needs_solution(const std::string& name) {
  static const std::set<std::string> needs = {"poh1",  "poh2",       "f_form",
                                              "trace", "regularity", "unique_continuation"};
  return needs.count(name) > 0;
}

struct RunContext {
  ExperimentConfig cfg;
  Kernel kernel;
  Domain domain;
  std::shared_ptr<const Grid> grid;
  std::unique_ptr<OperatorMatrix> op;
  std::shared_ptr<GridFunction> solution;
  double eigenvalue = 0.0;  // eigen problems
  json solve_info = json::object();

  // merged per-boundary-point trace/regularity table
  std::map<int, TraceRow> trace_table;

  RunContext(ExperimentConfig c)
      : cfg(std::move(c)), kernel(cfg.make_kernel()), domain(cfg.make_domain()) {}
};

void ensure_operator(RunContext& ctx) {
  if (ctx.op) return;
  ctx.op = std::make_unique<OperatorMatrix>(assemble(ctx.kernel, *ctx.grid));
}

void ensure_solution(RunContext& ctx) {
  if (ctx.solution) return;
  ensure_operator(ctx);
  const ExperimentConfig& cfg = ctx.cfg;
  SolveControls controls{cfg.tolerance, cfg.max_iterations};
  Vector u;
  switch (cfg.kind) {
    case ProblemKind::linear: {
      auto res = solve_linear(
          *ctx.op, [&](const Point& x) { return cfg.rhs.eval(x); }, controls);
      u = std::move(res.u);
      ctx.solve_info = {{"kind", "linear"},
                        {"algebraic_residual", res.residual},
                        {"iterations", res.iterations},
                        {"condition_estimate", res.condition_estimate}};
      break;
    }
    case ProblemKind::power: {
      auto res = solve_power(*ctx.op, cfg.exponent, controls);
      u = std::move(res.u);
      ctx.solve_info = {{"kind", "power"},
                        {"p", cfg.exponent},
                        {"equation_residual", res.equation_residual},
                        {"multiplier", res.multiplier},
                        {"iterations", res.iterations}};
      break;
    }
    case ProblemKind::eigen: {
      auto res = solve_eigen(*ctx.op, cfg.eigen_index, controls);
      u = std::move(res.function);
      ctx.eigenvalue = res.value;
      ctx.solve_info = {{"kind", "eigen"},
                        {"index", cfg.eigen_index},
                        {"eigenvalue", res.value},
                        {"residual", res.residual}};
      break;
    }
  }
  ctx.solution = std::make_shared<GridFunction>(ctx.grid, std::move(u));
}

PointwiseRhs problem_rhs(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  switch (cfg.kind) {
    case ProblemKind::linear:
      return [cfg](const Point& x, double) { return cfg.rhs.eval(x); };
    case ProblemKind::power: {
      double p = cfg.exponent;
      return [p](const Point&, double u) {
        return std::pow(std::abs(u), p - 1.0) * u;
      };
    }
    case ProblemKind::eigen: {
      double lambda = ctx.eigenvalue;
      return [lambda](const Point&, double u) { return lambda * u; };
    }
  }
  return {};
}

TraceOptions trace_options(const ExperimentConfig& cfg) {
  TraceOptions t;
  t.t0 = cfg.trace_t0;
  t.levels = cfg.trace_levels;
  return t;
}

PohozaevOptions poh_options(const RunContext& ctx, const CheckSpec& spec) {
  PohozaevOptions opt;
  opt.boundary_points = ctx.cfg.boundary_m;
  opt.trace = trace_options(ctx.cfg);
  if (spec.extra.is_object() && spec.extra.contains("origin")) {
    const auto& o = spec.extra["origin"];
    if (!o.is_array() || o.empty())
      throw validation_error("checks[].origin must be a point array");
    opt.origin[0] = o[0].get<double>();
    if (o.size() > 1) opt.origin[1] = o[1].get<double>();
  }
  return opt;
}

QuadratureParams quad_params(const RunContext& ctx) {
  QuadratureParams q;
  q.scale = ctx.domain.diameter();
  q.cutoff_factor = ctx.cfg.cutoff_factor;
  q.angular_nodes = ctx.cfg.angular_nodes;
  return q;
}

std::vector<int> selected_boundary(const RunContext& ctx, size_t total) {
  if (ctx.cfg.trace_points.empty()) {
    std::vector<int> all(total);
    for (size_t j = 0; j < total; ++j) all[j] = static_cast<int>(j);
    return all;
  }
  std::vector<int> out;
  for (int j : ctx.cfg.trace_points)
    if (j >= 0 && j < static_cast<int>(total)) out.push_back(j);
  return out;
}

ReportRow base_row(const RunContext& ctx, const std::string& check) {
  ReportRow row;
  row.check = check;
  row.s = ctx.cfg.order;
  row.p = ctx.cfg.kind == ProblemKind::power ? ctx.cfg.exponent : kNaN;
  row.resolution = ctx.cfg.grid_n;
  row.lhs = kNaN;
  row.rhs_volume = kNaN;
  row.rhs_boundary = kNaN;
  row.residual_abs = kNaN;
  row.residual_rel = kNaN;
  row.value = kNaN;
  return row;
}

ReportRow run_check(RunContext& ctx, const CheckSpec& spec) {
  const std::string& name = spec.name;
  const ExperimentConfig& cfg = ctx.cfg;
  const double tol =
      spec.tol > 0 ? spec.tol : default_check_tolerance(name, cfg.dim);
  ReportRow row = base_row(ctx, name);
  row.gate = tol;
  const double t_start = now_ms();

  if (check_needs_solution(name)) ensure_solution(ctx);

  if (name == "poh1" || name == "poh2" || name == "f_form") {
    PohozaevOptions opt = poh_options(ctx, spec);
    PohozaevReport rep;
    if (name == "poh1") {
      rep = verify_poh1(*ctx.op, *ctx.solution, problem_rhs(ctx), opt);
    } else if (name == "poh2") {
      Point e(1.0, 0.0);
      if (spec.extra.is_object() && spec.extra.contains("e")) {
        const auto& ev = spec.extra["e"];
        e[0] = ev[0].get<double>();
        e[1] = ev.size() > 1 ? ev[1].get<double>() : 0.0;
      }
      if (cfg.dim == 1) e[1] = 0.0;
      e /= cfg.dim == 1 ? std::abs(e[0]) : e.norm();
      rep = verify_poh2(*ctx.op, *ctx.solution, problem_rhs(ctx), e, opt);
      row.diagnostics["e"] = {e[0], e[1]};
    } else {
      if (cfg.kind == ProblemKind::linear && !cfg.rhs.autonomous())
        throw validation_error(
            "checks f_form: requires an autonomous nonlinearity (constant g, "
            "power, or eigen problems)");
      std::function<double(double)> f, F;
      switch (cfg.kind) {
        case ProblemKind::linear: {
          double g0 = cfg.rhs.value;
          f = [g0](double) { return g0; };
          F = [g0](double t) { return g0 * t; };
          break;
        }
        case ProblemKind::power: {
          double p = cfg.exponent;
          f = [p](double t) { return std::pow(std::abs(t), p - 1.0) * t; };
          F = [p](double t) { return std::pow(std::abs(t), p + 1.0) / (p + 1.0); };
          break;
        }
        case ProblemKind::eigen: {
          double lambda = ctx.eigenvalue;
          f = [lambda](double t) { return lambda * t; };
          F = [lambda](double t) { return 0.5 * lambda * t * t; };
          break;
        }
      }
      rep = f_form_identity(*ctx.op, *ctx.solution, f, F, opt);
    }
    row.lhs = rep.lhs_volume;
    row.rhs_volume = rep.rhs_volume;
    row.rhs_boundary = rep.rhs_boundary;
    row.residual_abs = rep.residual_abs;
    row.residual_rel = rep.residual_rel;
    row.value = rep.residual_rel;
    row.passed = rep.residual_rel <= tol;
    row.diagnostics["equation_residual"] = rep.equation_residual;
    row.diagnostics["boundary_gross"] = rep.boundary_gross;
  } else if (name == "trace") {
    BoundaryQuadrature bq = boundary_nodes(ctx.domain, cfg.boundary_m);
    double worst = 0.0;
    for (int j : selected_boundary(ctx, bq.size())) {
      TraceSample ts = trace_quotient(*ctx.solution, ctx.domain, cfg.order,
                                      bq.nodes[j], bq.normals[j], trace_options(cfg));
      TraceRow& tr = ctx.trace_table[j];
      tr.z0 = bq.nodes[j][0];
      tr.z1 = bq.nodes[j][1];
      tr.quotient = ts.quotient;
      tr.fit_residual = ts.fit_residual;
      worst = std::max(worst, ts.fit_residual / std::max(1e-12, std::abs(ts.quotient)));
    }
    row.value = worst;
    row.passed = worst <= tol;
  } else if (name == "regularity") {
    BoundaryQuadrature bq = boundary_nodes(ctx.domain, cfg.boundary_m);
    RegularityOptions ro;
    ro.r0 = cfg.radii_r0;
    ro.levels = cfg.radii_levels;
    double min_gamma = std::numeric_limits<double>::infinity();
    for (int j : selected_boundary(ctx, bq.size())) {
      RegularityFit fit =
          regularity_probe(*ctx.solution, ctx.domain, cfg.order, bq.nodes[j], ro);
      TraceRow& tr = ctx.trace_table[j];
      tr.z0 = bq.nodes[j][0];
      tr.z1 = bq.nodes[j][1];
      tr.gamma_fit = fit.gamma_fit;
      tr.r_squared = fit.r_squared;
      min_gamma = std::min(min_gamma, fit.gamma_fit);
    }
    row.value = min_gamma;
    row.passed = min_gamma >= tol;  // gate is a floor for the fitted exponent
  } else if (name == "lds") {
    std::vector<Point> probes;
    BoundaryQuadrature bq = boundary_nodes(ctx.domain, cfg.dim == 1 ? 2 : 4);
    const double inr = ctx.domain.inradius();
    for (size_t j = 0; j < bq.size(); ++j)
      for (double frac : {0.2, 0.1, 0.05, 0.025})
        probes.push_back(bq.nodes[j] - frac * inr * bq.normals[j]);
    QuadratureParams q = quad_params(ctx);
    double v0 = lds_bound_check(ctx.kernel, ctx.domain, probes, q.refined(1));
    double v1 = lds_bound_check(ctx.kernel, ctx.domain, probes, q.refined(2));
    row.value = std::abs(v0 - v1) / std::max(1e-12, std::abs(v1));
    row.passed = row.value <= tol;
    row.diagnostics = {{"max_lds_coarse", v0}, {"max_lds_fine", v1}};
  } else if (name == "scaling_identity") {
    const double ell = 0.5 * ctx.domain.inradius();
    const Point c0 = cfg.dim == 1
                         ? Point(0.5 * (cfg.shape_params[0] + cfg.shape_params[1]), 0.0)
                         : ctx.domain.center();
    auto u = [ell, c0](const Point& x) {
      double q = (x - c0).squaredNorm() / (ell * ell);
      return q < 1.0 ? std::pow(1.0 - q, 6.0) : 0.0;
    };
    auto grad = [ell, c0](const Point& x) {
      double q = (x - c0).squaredNorm() / (ell * ell);
      if (q >= 1.0) return Point(0.0, 0.0);
      return Point((-12.0 / (ell * ell)) * std::pow(1.0 - q, 5.0) * (x - c0));
    };
    std::vector<Point> probes;
    for (int k = 0; k < 8; ++k) {
      double t = -0.5 + k / 7.0;
      probes.push_back(c0 + Point(t * ell, cfg.dim == 2 ? 0.3 * t * ell : 0.0));
    }
    QuadratureParams q = quad_params(ctx);
    q.scale = 2.0 * ell;
    auto res = scaling_identity_residual(ctx.kernel, u, grad, probes, q);
    row.residual_abs = res.residual;
    row.residual_rel = res.residual / std::max(1e-12, res.scale);
    row.value = row.residual_rel;
    row.passed = row.value <= tol;
  } else if (name == "toy_identity") {
    const double ell = 0.5 * ctx.domain.inradius();
    const Point c0 = cfg.dim == 1
                         ? Point(0.5 * (cfg.shape_params[0] + cfg.shape_params[1]), 0.0)
                         : ctx.domain.center();
    auto u = [ell, c0](const Point& x) {
      double q = (x - c0).squaredNorm() / (ell * ell);
      return q < 1.0 ? std::pow(1.0 - q, 6.0) : 0.0;
    };
    auto grad = [ell, c0](const Point& x) {
      double q = (x - c0).squaredNorm() / (ell * ell);
      if (q >= 1.0) return Point(0.0, 0.0);
      return Point((-12.0 / (ell * ell)) * std::pow(1.0 - q, 5.0) * (x - c0));
    };
    QuadratureParams q = quad_params(ctx);
    q.scale = 2.0 * ell;
    auto [lhs, rhs] =
        compact_support_identity_residual(ctx.kernel, u, grad, *ctx.grid, q);
    row.lhs = lhs;
    row.rhs_volume = rhs;
    row.residual_abs = std::abs(lhs - rhs);
    row.residual_rel = row.residual_abs / std::max({std::abs(lhs), std::abs(rhs), 1e-12});
    row.value = row.residual_rel;
    row.passed = row.value <= tol;
  } else if (name == "nonexistence") {
    double p = cfg.kind == ProblemKind::power ? cfg.exponent : kNaN;
    if (spec.extra.is_object() && spec.extra.contains("p"))
      p = spec.extra["p"].get<double>();
    if (!std::isfinite(p))
      throw validation_error(
          "checks nonexistence: needs `p` (from a power problem or the check entry)");
    Point origin = Point::Zero();
    ObstructionVerdict v = nonexistence_verdict(p, ctx.kernel, ctx.domain, origin);
    row.p = p;
    row.value = v.coefficient;
    row.passed = true;
    row.gate = 0.0;
    const char* cls = v.sign_class == ObstructionVerdict::SignClass::subcritical
                          ? "subcritical"
                          : (v.sign_class == ObstructionVerdict::SignClass::critical
                                 ? "critical"
                                 : "supercritical");
    row.diagnostics = {{"p_critical", std::isfinite(v.p_critical)
                                          ? json(v.p_critical)
                                          : json("inf")},
                       {"sign_class", cls},
                       {"star_margin", v.star_margin},
                       {"verdict", v.verdict}};
  } else if (name == "unique_continuation") {
    if (cfg.kind != ProblemKind::eigen)
      throw validation_error("checks unique_continuation: requires an eigen problem");
    double v = unique_continuation_check(*ctx.solution, cfg.order, cfg.boundary_m,
                                         trace_options(cfg));
    row.value = v;
    row.passed = v >= tol;
    row.diagnostics["eigenvalue"] = ctx.eigenvalue;
  } else {
    throw validation_error("unknown check " + name);
  }

  row.wall_ms = now_ms() - t_start;
  return row;
}

}  // namespace

double default_check_tolerance(const std::string& check, int dim) {
  if (check == "poh1" || check == "f_form") return dim == 1 ? 0.02 : 0.05;
  if (check == "poh2") return 0.03;
  if (check == "trace") return 0.05;
  if (check == "regularity") return 0.0;  // floor on the fitted exponent
  if (check == "lds") return 0.10;
  if (check == "scaling_identity") return 1e-3;
  if (check == "toy_identity") return dim == 1 ? 1e-3 : 1e-2;
  if (check == "unique_continuation") return 0.05;
  return 0.0;
}

RunOutcome run(const ExperimentConfig& cfg) {
  RunContext ctx(cfg);
  ctx.grid = std::make_shared<const Grid>(
      build_grid(ctx.domain, cfg.grid_n, cfg.effective_grading()));

  RunOutcome out;
  bool needs_solution = cfg.checks.empty();
  for (const CheckSpec& spec : cfg.checks)
    needs_solution |= check_needs_solution(spec.name);
  if (needs_solution) ensure_solution(ctx);

  for (const CheckSpec& spec : cfg.checks) {
    ReportRow row = run_check(ctx, spec);
    out.all_passed &= row.passed;
    out.rows.push_back(std::move(row));
  }
  for (auto& [j, tr] : ctx.trace_table) out.trace_rows.push_back(tr);
  out.diagnostics["solve"] = ctx.solve_info;
  out.solution = ctx.solution;
  if (ctx.cfg.kind == ProblemKind::eigen && ctx.solution)
    out.diagnostics["eigenvalue"] = ctx.eigenvalue;
  return out;
}

RunOutcome sweep(const ExperimentConfig& cfg) {
  require(cfg.sweep.has_value(), "sweep config needs a sweep block");
  const SweepSpec& sw = *cfg.sweep;
  RunOutcome all;
  std::map<std::string, std::vector<double>> residual_trace;
  for (double value : sw.values) {
    ExperimentConfig point = cfg;
    point.sweep.reset();
    if (sw.parameter == "N") {
      point.grid_n = static_cast<int>(value);
    } else if (sw.parameter == "s") {
      point.order = value;
    } else if (sw.parameter == "p") {
      point.kind = ProblemKind::power;
      point.exponent = value;
    } else {  // scale
      for (double& sp : point.shape_params) sp *= value;
      if (point.distance_cap > 0) point.distance_cap *= value;
    }
    RunOutcome one = run(point);
    all.all_passed &= one.all_passed;
    for (ReportRow& row : one.rows) {
      if (std::isfinite(row.residual_rel) && row.residual_rel > 0)
        residual_trace[row.check].push_back(row.residual_rel);
      all.rows.push_back(std::move(row));
    }
  }
  // Observed order from successive residuals.
  for (const auto& [check, residuals] : residual_trace) {
    if (residuals.size() < 2) continue;
    std::vector<double> orders;
    for (size_t k = 0; k + 1 < residuals.size(); ++k)
      orders.push_back(std::log2(residuals[k] / residuals[k + 1]));
    double mean = 0.0;
    for (double o : orders) mean += o;
    mean /= static_cast<double>(orders.size());
    ReportRow row;
    row.check = check + ":order";
    row.s = cfg.order;
    row.p = kNaN;
    row.resolution = 0;
    row.lhs = row.rhs_volume = row.rhs_boundary = row.residual_abs =
        row.residual_rel = kNaN;
    row.value = mean;
    row.gate = 0.0;
    row.passed = mean > 0.0;
    row.diagnostics = {{"log2_ratios", orders}};
    all.all_passed &= row.passed;
    all.rows.push_back(std::move(row));
  }
  return all;
}

void write_outputs(const RunOutcome& outcome, const ExperimentConfig& cfg,
                   const std::string& out_dir) {
  const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/reports.csv", report_csv(outcome.rows));
  json mirror = report_json(outcome.rows, cfg.echo());
  mirror["diagnostics"] = outcome.diagnostics;
  write_text_file(dir + "/reports.json", mirror.dump(2) + "\n");
  if (!outcome.trace_rows.empty())
    write_text_file(dir + "/trace.csv", trace_csv(outcome.trace_rows, cfg.dim));
  if (outcome.solution) {
    json meta{{"problem", cfg.echo()["problem"]}};
    if (outcome.diagnostics.contains("eigenvalue"))
      meta["eigenvalue"] = outcome.diagnostics["eigenvalue"];
    save_solution(*outcome.solution, cfg, dir + "/solution.bin", meta);
  }
}

RunOutcome check_solution(const std::string& path, const std::string& check,
                          double tol) {
  LoadedSolution loaded = load_solution(path);
  ExperimentConfig cfg = loaded.spec;
  CheckSpec spec;
  spec.name = check;
  spec.tol = tol;
  // Problem metadata from the file drives the nonlinearity.
  if (loaded.meta.contains("problem")) {
    const json& pr = loaded.meta["problem"];
    std::string kind = pr.value("kind", "linear");
    if (kind == "power") {
      cfg.kind = ProblemKind::power;
      cfg.exponent = pr.value("p", 2.0);
    } else if (kind == "eigen") {
      cfg.kind = ProblemKind::eigen;
      cfg.eigen_index = pr.value("index", 1);
    }
  }
  cfg.checks = {spec};

  RunContext ctx(cfg);
  ctx.grid = loaded.u.grid;
  ctx.solution = std::make_shared<GridFunction>(loaded.u);
  if (loaded.meta.contains("eigenvalue"))
    ctx.eigenvalue = loaded.meta["eigenvalue"].get<double>();
  if (check_needs_solution(check)) ensure_operator(ctx);

  RunOutcome out;
  ReportRow row = run_check(ctx, spec);
  out.all_passed = row.passed;
  out.rows.push_back(std::move(row));
  for (auto& [j, tr] : ctx.trace_table) out.trace_rows.push_back(tr);
  out.solution = ctx.solution;
  return out;
}

}  // namespace fracpoh
