#pragma once

#include "fracpoh/geometry.hpp"
#include "fracpoh/kernel.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fracpoh {

// Malformed experiment configs; message names the offending field.
struct validation_error : parameter_error {
  using parameter_error::parameter_error;
};

enum class ProblemKind { linear, power, eigen };

struct RhsSpec {
  enum class Type { constant, affine, sign } type = Type::constant;
  double value = 1.0;            // constant
  double a0 = 0.0, ax = 0.0, ay = 0.0;  // affine a0 + ax x + ay y
  int axis = 0;                  // sign(x_axis)
  double eval(const Point& x) const;
  bool autonomous() const { return type == Type::constant; }
};

struct CheckSpec {
  std::string name;
  double tol = 0.0;          // 0 -> per-check default
  nlohmann::json extra;      // check-specific fields (direction, p, ...)
};

struct SweepSpec {
  std::string parameter;     // N | s | p | scale
  std::vector<double> values;
};

struct ExperimentConfig {
  // kernel block
  int dim = 1;
  double order = 0.5;
  AngularDensity density = AngularDensity::constant_density(1.0);
  bool density_is_default = true;  // constant at c_frac

  // domain block
  Domain::Shape shape = Domain::Shape::interval;
  std::vector<double> shape_params;  // interval a,b | ball cx,cy,r | ellipse cx,cy,ax,ay | annulus rin,rout
  double distance_cap = 0.0;
  int grid_n = 256;
  double grading = 0.0;      // 0 -> default (2 in 1-D, 1 in 2-D)
  int boundary_m = 256;

  // problem block
  ProblemKind kind = ProblemKind::linear;
  RhsSpec rhs;
  double exponent = 2.0;
  int eigen_index = 1;
  double tolerance = 1e-10;
  int max_iterations = 2000;

  std::vector<CheckSpec> checks;

  // quadrature block
  double split_radius_factor = 2.0;
  double cutoff_factor = 4.0;
  int angular_nodes = 64;

  // trace block
  std::vector<int> trace_points;  // empty -> all
  double trace_t0 = 0.0;
  int trace_levels = 6;
  double radii_r0 = 0.0;
  int radii_levels = 5;

  std::optional<SweepSpec> sweep;

  std::string out_dir = "out";
  unsigned long long seed = 1234;
  int threads = 1;

  Kernel make_kernel() const;
  Domain make_domain() const;
  double effective_grading() const { return grading > 0 ? grading : (dim == 1 ? 2.0 : 1.0); }

  static ExperimentConfig parse(const nlohmann::json& doc);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json echo() const;  // normalized form for the JSON report
};

}  // namespace fracpoh
