#include "fracpoh/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace fracpoh {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw validation_error("config field `" + field + "`: " + why);
}

double num(const json& j, const std::string& field, double lo, double hi,
           bool lo_strict = false, bool hi_strict = false) {
  if (!j.is_number()) fail(field, "must be a number");
  double v = j.get<double>();
  bool ok = (lo_strict ? v > lo : v >= lo) && (hi_strict ? v < hi : v <= hi);
  if (!ok)
    fail(field, "value " + std::to_string(v) + " outside the admissible range");
  return v;
}

int integer(const json& j, const std::string& field, int lo, int hi) {
  if (!j.is_number_integer()) fail(field, "must be an integer");
  int v = j.get<int>();
  if (v < lo || v > hi) fail(field, "value " + std::to_string(v) + " out of range");
  return v;
}

const std::set<std::string> kKnownChecks = {
    "poh1",       "poh2", "f_form",           "trace",
    "regularity", "lds",  "scaling_identity", "toy_identity",
    "nonexistence", "unique_continuation"};

}  // namespace

double RhsSpec::eval(const Point& x) const {
  switch (type) {
    case Type::constant: return value;
    case Type::affine: return a0 + ax * x[0] + ay * x[1];
    case Type::sign: return x[axis] >= 0 ? 1.0 : -1.0;
  }
  return 0.0;
}

Kernel ExperimentConfig::make_kernel() const {
  if (density_is_default) return Kernel::fractional(dim, order);
  return Kernel::make(dim, order, density);
}

Domain ExperimentConfig::make_domain() const {
  switch (shape) {
    case Domain::Shape::interval:
      return Domain::interval(shape_params[0], shape_params[1], distance_cap);
    case Domain::Shape::ball:
      return Domain::ball(Point(shape_params[0], shape_params[1]), shape_params[2],
                          distance_cap);
    case Domain::Shape::ellipse:
      return Domain::ellipse(Point(shape_params[0], shape_params[1]),
                             shape_params[2], shape_params[3], distance_cap);
    case Domain::Shape::annulus:
      return Domain::annulus(shape_params[0], shape_params[1], distance_cap);
  }
  throw validation_error("config field `domain.shape`: unsupported shape");
}

ExperimentConfig ExperimentConfig::parse(const json& doc) {
  ExperimentConfig c;
  if (!doc.is_object()) fail("<root>", "config must be a JSON object");

  // --- kernel ---
  if (!doc.contains("kernel") || !doc["kernel"].is_object())
    fail("kernel", "missing kernel block");
  const json& k = doc["kernel"];
  if (!k.contains("s")) fail("kernel.s", "missing");
  c.order = num(k["s"], "kernel.s", 0.0, 1.0, true, true);
  if (!k.contains("n")) fail("kernel.n", "missing");
  c.dim = integer(k["n"], "kernel.n", 1, 2);
  if (k.contains("angular")) {
    const json& a = k["angular"];
    std::string type = a.value("type", "constant");
    if (type == "constant") {
      if (a.contains("value") && !a["value"].is_null()) {
        c.density = AngularDensity::constant_density(
            num(a["value"], "kernel.angular.value", 0.0, 1e12, true));
        c.density_is_default = false;
      }
    } else if (type == "sampled") {
      if (!a.contains("values") || !a["values"].is_array())
        fail("kernel.angular.values", "sampled density needs a values array");
      std::vector<double> vals;
      for (const auto& v : a["values"]) {
        if (!v.is_number()) fail("kernel.angular.values", "entries must be numbers");
        vals.push_back(v.get<double>());
      }
      try {
        c.density = AngularDensity::sampled_density(std::move(vals), c.dim);
      } catch (const parameter_error& e) {
        fail("kernel.angular.values", e.what());
      }
      c.density_is_default = false;
    } else {
      fail("kernel.angular.type", "must be \"constant\" or \"sampled\"");
    }
  }

  // --- domain ---
  if (!doc.contains("domain") || !doc["domain"].is_object())
    fail("domain", "missing domain block");
  const json& d = doc["domain"];
  std::string shape = d.value("shape", "");
  const json params = d.value("params", json::object());
  auto p = [&](const char* key, const char* field) {
    if (!params.contains(key)) fail(std::string("domain.params.") + key, "missing");
    return num(params[key], field, -1e9, 1e9);
  };
  if (shape == "interval") {
    if (c.dim != 1) fail("domain.shape", "interval requires kernel.n = 1");
    c.shape = Domain::Shape::interval;
    c.shape_params = {p("a", "domain.params.a"), p("b", "domain.params.b")};
    if (c.shape_params[1] <= c.shape_params[0])
      fail("domain.params", "needs a < b");
  } else if (shape == "ball") {
    if (c.dim != 2) fail("domain.shape", "ball requires kernel.n = 2");
    c.shape = Domain::Shape::ball;
    double cx = 0, cy = 0;
    if (params.contains("center")) {
      if (!params["center"].is_array() || params["center"].size() != 2)
        fail("domain.params.center", "must be [x, y]");
      cx = params["center"][0].get<double>();
      cy = params["center"][1].get<double>();
    }
    c.shape_params = {cx, cy, p("radius", "domain.params.radius")};
    if (c.shape_params[2] <= 0) fail("domain.params.radius", "must be positive");
  } else if (shape == "ellipse") {
    if (c.dim != 2) fail("domain.shape", "ellipse requires kernel.n = 2");
    c.shape = Domain::Shape::ellipse;
    double cx = 0, cy = 0;
    if (params.contains("center")) {
      cx = params["center"][0].get<double>();
      cy = params["center"][1].get<double>();
    }
    if (!params.contains("semi_axes") || !params["semi_axes"].is_array() ||
        params["semi_axes"].size() != 2)
      fail("domain.params.semi_axes", "must be [ax, ay]");
    c.shape_params = {cx, cy, params["semi_axes"][0].get<double>(),
                      params["semi_axes"][1].get<double>()};
    if (c.shape_params[2] <= 0 || c.shape_params[3] <= 0)
      fail("domain.params.semi_axes", "must be positive");
  } else if (shape == "annulus") {
    if (c.dim != 2) fail("domain.shape", "annulus requires kernel.n = 2");
    c.shape = Domain::Shape::annulus;
    c.shape_params = {p("r_in", "domain.params.r_in"), p("r_out", "domain.params.r_out")};
    if (!(c.shape_params[0] > 0 && c.shape_params[1] > c.shape_params[0]))
      fail("domain.params", "needs 0 < r_in < r_out");
  } else {
    fail("domain.shape", "must be one of interval | ball | ellipse | annulus");
  }
  if (d.contains("distance_cap"))
    c.distance_cap = num(d["distance_cap"], "domain.distance_cap", 0.0, 1e9, true);
  if (d.contains("grid")) {
    const json& g = d["grid"];
    if (g.contains("N")) c.grid_n = integer(g["N"], "domain.grid.N", 8, 1 << 20);
    if (g.contains("grading"))
      c.grading = num(g["grading"], "domain.grid.grading", 1.0, 8.0);
  }
  if (d.contains("boundary_nodes"))
    c.boundary_m = integer(d["boundary_nodes"], "domain.boundary_nodes", 2, 1 << 16);

  // --- problem ---
  if (doc.contains("problem")) {
    const json& pr = doc["problem"];
    std::string kind = pr.value("kind", "linear");
    if (kind == "linear") {
      c.kind = ProblemKind::linear;
      if (pr.contains("g")) {
        const json& g = pr["g"];
        std::string t = g.value("type", "constant");
        if (t == "constant") {
          c.rhs.type = RhsSpec::Type::constant;
          c.rhs.value = g.value("value", 1.0);
        } else if (t == "affine") {
          c.rhs.type = RhsSpec::Type::affine;
          c.rhs.a0 = g.value("a0", 0.0);
          c.rhs.ax = g.value("ax", 0.0);
          c.rhs.ay = g.value("ay", 0.0);
        } else if (t == "sign") {
          c.rhs.type = RhsSpec::Type::sign;
          c.rhs.axis = g.value("axis", 0);
          if (c.rhs.axis < 0 || c.rhs.axis >= c.dim) fail("problem.g.axis", "out of range");
        } else {
          fail("problem.g.type", "must be constant | affine | sign");
        }
      }
    } else if (kind == "power") {
      c.kind = ProblemKind::power;
      if (!pr.contains("p")) fail("problem.p", "missing");
      c.exponent = num(pr["p"], "problem.p", 1.0, 100.0, true);
    } else if (kind == "eigen") {
      c.kind = ProblemKind::eigen;
      c.eigen_index = integer(pr.value("index", 1), "problem.index", 1, 64);
    } else {
      fail("problem.kind", "must be linear | power | eigen");
    }
    if (pr.contains("tol"))
      c.tolerance = num(pr["tol"], "problem.tol", 0.0, 1.0, true);
    if (pr.contains("max_iter"))
      c.max_iterations = integer(pr["max_iter"], "problem.max_iter", 1, 1 << 22);
  }

  // --- checks ---
  if (doc.contains("checks")) {
    if (!doc["checks"].is_array()) fail("checks", "must be an array");
    for (const auto& item : doc["checks"]) {
      CheckSpec cs;
      if (item.is_string()) {
        cs.name = item.get<std::string>();
      } else if (item.is_object()) {
        if (!item.contains("name")) fail("checks[].name", "missing");
        cs.name = item["name"].get<std::string>();
        if (item.contains("tol")) cs.tol = num(item["tol"], "checks[].tol", 0.0, 1e9, true);
        cs.extra = item;
      } else {
        fail("checks[]", "entries are names or objects");
      }
      if (!kKnownChecks.count(cs.name)) fail("checks[].name", "unknown check " + cs.name);
      c.checks.push_back(std::move(cs));
    }
  }

  // --- quadrature ---
  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    if (q.contains("split_radius_factor"))
      c.split_radius_factor =
          num(q["split_radius_factor"], "quadrature.split_radius_factor", 0.0, 100.0, true);
    if (q.contains("cutoff_factor"))
      c.cutoff_factor = num(q["cutoff_factor"], "quadrature.cutoff_factor", 1.0, 1e4);
    if (q.contains("angular_nodes"))
      c.angular_nodes = integer(q["angular_nodes"], "quadrature.angular_nodes", 8, 1 << 14);
  }

  // --- trace ---
  if (doc.contains("trace")) {
    const json& t = doc["trace"];
    if (t.contains("points") && !t["points"].is_string()) {
      if (!t["points"].is_array()) fail("trace.points", "\"all\" or an index array");
      for (const auto& v : t["points"])
        c.trace_points.push_back(integer(v, "trace.points[]", 0, 1 << 20));
    }
    if (t.contains("ladder")) {
      const json& l = t["ladder"];
      if (l.contains("t0")) c.trace_t0 = num(l["t0"], "trace.ladder.t0", 0.0, 1e9);
      if (l.contains("levels"))
        c.trace_levels = integer(l["levels"], "trace.ladder.levels", 3, 24);
    }
    if (t.contains("radii")) {
      const json& r = t["radii"];
      if (r.contains("r0")) c.radii_r0 = num(r["r0"], "trace.radii.r0", 0.0, 1e9);
      if (r.contains("levels"))
        c.radii_levels = integer(r["levels"], "trace.radii.levels", 3, 24);
    }
  }

  // --- sweep ---
  if (doc.contains("sweep") && !doc["sweep"].is_null()) {
    const json& sw = doc["sweep"];
    SweepSpec spec;
    spec.parameter = sw.value("parameter", "");
    if (spec.parameter != "N" && spec.parameter != "s" && spec.parameter != "p" &&
        spec.parameter != "scale")
      fail("sweep.parameter", "must be one of N | s | p | scale");
    if (!sw.contains("values") || !sw["values"].is_array() || sw["values"].empty())
      fail("sweep.values", "needs a nonempty value list");
    for (const auto& v : sw["values"]) {
      if (!v.is_number()) fail("sweep.values[]", "must be numbers");
      spec.values.push_back(v.get<double>());
    }
    c.sweep = std::move(spec);
  }

  // --- output / misc ---
  if (doc.contains("output")) {
    c.out_dir = doc["output"].value("dir", c.out_dir);
  }
  if (doc.contains("seed")) c.seed = doc["seed"].get<unsigned long long>();
  if (doc.contains("threads")) c.threads = integer(doc["threads"], "threads", 1, 256);

  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw validation_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse(doc);
}

nlohmann::json ExperimentConfig::echo() const {
  json k{{"s", order}, {"n", dim}};
  if (density_is_default) {
    k["angular"] = {{"type", "constant"}, {"value", nullptr}};
  } else if (density.type == AngularDensity::Type::constant) {
    k["angular"] = {{"type", "constant"}, {"value", density.value}};
  } else {
    k["angular"] = {{"type", "sampled"}, {"count", density.samples.size()}};
  }
  json d;
  switch (shape) {
    case Domain::Shape::interval:
      d = {{"shape", "interval"}, {"a", shape_params[0]}, {"b", shape_params[1]}};
      break;
    case Domain::Shape::ball:
      d = {{"shape", "ball"},
           {"center", {shape_params[0], shape_params[1]}},
           {"radius", shape_params[2]}};
      break;
    case Domain::Shape::ellipse:
      d = {{"shape", "ellipse"},
           {"center", {shape_params[0], shape_params[1]}},
           {"semi_axes", {shape_params[2], shape_params[3]}}};
      break;
    case Domain::Shape::annulus:
      d = {{"shape", "annulus"}, {"r_in", shape_params[0]}, {"r_out", shape_params[1]}};
      break;
  }
  d["grid"] = {{"N", grid_n}, {"grading", effective_grading()}};
  d["boundary_nodes"] = boundary_m;
  json pr;
  switch (kind) {
    case ProblemKind::linear: pr = {{"kind", "linear"}}; break;
    case ProblemKind::power: pr = {{"kind", "power"}, {"p", exponent}}; break;
    case ProblemKind::eigen: pr = {{"kind", "eigen"}, {"index", eigen_index}}; break;
  }
  json out{{"kernel", k}, {"domain", d}, {"problem", pr}, {"seed", seed}};
  return out;
}

}  // namespace fracpoh
