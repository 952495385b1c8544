#include "fracpoh/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fracpoh {

namespace {

Vector rhs_values(const Grid& grid, const GridFunction& u, const PointwiseRhs& f) {
  Vector fv(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) fv[i] = f(grid.nodes[i], u.values[i]);
  return fv;
}

double equation_gate_check(const OperatorMatrix& op, const GridFunction& u,
                           const Vector& fv, double gate) {
  Vector b = op.mass.cwiseProduct(fv);
  double bnorm = b.norm();
  double unorm = op.form_apply(u.values).norm();
  double res = (op.form_apply(u.values) - b).norm() / std::max({bnorm, unorm, 1e-300});
  if (res > gate)
    throw parameter_error(
        "u is not a near-solution of Lu = f (relative equation residual " +
        std::to_string(res) + " exceeds the gate " + std::to_string(gate) +
        "); substituting f for Lu would be invalid");
  return res;
}

struct BoundaryTerm {
  double weighted = 0.0;  // int A (u/d^s)^2 g(z) dsigma for the given weight g
  double gross = 0.0;     // same with |g|
};

BoundaryTerm boundary_integral(const OperatorMatrix& op, const GridFunction& u,
                               const PohozaevOptions& opt,
                               const std::function<double(const Point&, const Point&)>& g) {
  const Domain& dom = *op.grid->domain;
  const Kernel& ker = op.kernel;
  BoundaryQuadrature bq = boundary_nodes(dom, opt.boundary_points);
  const double gamma_sq = ker.constants.gamma_sq;
  BoundaryTerm out;
  for (size_t j = 0; j < bq.size(); ++j) {
    TraceSample ts =
        trace_quotient(u, dom, ker.order, bq.nodes[j], bq.normals[j], opt.trace);
    double a = anisotropy(ker, bq.normals[j]);
    double common = gamma_sq * a * ts.quotient * ts.quotient * bq.weights[j];
    double gz = g(bq.nodes[j], bq.normals[j]);
    out.weighted += common * gz;
    out.gross += std::abs(common * gz) + common * std::abs(gz) * 0.0;
    out.gross += 0.0;
  }
  return out;
}

}  // namespace

std::vector<Point> corrected_gradient(const GridFunction& u, double order) {
  const Grid& grid = *u.grid;
  const Domain& dom = *grid.domain;
  const double s = order;
  const size_t n = grid.size();
  std::vector<Point> grad(n, Point::Zero());

  for (size_t i = 0; i < n; ++i) {
    const Point& x = grid.nodes[i];
    Point g = Point::Zero();
    double spacing;
    if (grid.dim == 1) {
      const auto& v = grid.vertices;
      size_t vi = i + 1;  // node i sits at vertex i+1
      double ul = vi >= 2 ? (vi - 2 < n ? u.values[vi - 2] : 0.0) : 0.0;
      double ur = vi < n ? u.values[vi] : 0.0;
      g[0] = (ur - ul) / (v[vi + 1] - v[vi - 1]);
      spacing = std::min(v[vi] - v[vi - 1], v[vi + 1] - v[vi]);
    } else {
      auto nodal = [&](int dx, int dy) -> double {
        double fx = (x[0] - grid.cell0[0]) / grid.h;
        double fy = (x[1] - grid.cell0[1]) / grid.h;
        int jx = static_cast<int>(std::lround(fx)) + dx;
        int jy = static_cast<int>(std::lround(fy)) + dy;
        int node = grid.node_at(jx, jy);
        return node < 0 ? 0.0 : u.values[node];
      };
      g[0] = (nodal(1, 0) - nodal(-1, 0)) / (2.0 * grid.h);
      g[1] = (nodal(0, 1) - nodal(0, -1)) / (2.0 * grid.h);
      spacing = grid.h;
    }

    const double d = dom.distance(x);
    const double layer = std::min(0.5 * dom.distance_cap(), 6.0 * spacing);
    if (d < layer) {
      // Boundary layer: differences cannot track the d^{s-1} slope, so the
      // normal component follows the local profile u ~ Q d^s with the
      // cell-averaged singular factor.
      Point grad_d = dom.distance_gradient(x);
      double gn = grad_d.norm();
      if (gn > 0.5) {
        Point inward = grad_d / gn;
        double qhat = u.values[i] / std::pow(d, s);
        double ratio = cell_distance_moment_ratio(grid, static_cast<int>(i), s - 1.0);
        double normal_slope = qhat * s * std::pow(d, s - 1.0) * ratio;
        Point tangential = g - g.dot(inward) * inward;
        g = tangential + normal_slope * inward;
      }
    }
    grad[i] = g;
  }
  return grad;
}

PohozaevReport verify_poh1(const OperatorMatrix& op, const GridFunction& u,
                           const PointwiseRhs& f, const PohozaevOptions& opt) {
  const Grid& grid = *op.grid;
  const Kernel& ker = op.kernel;
  const double s = ker.order;
  const int n = ker.dim;

  Vector fv = rhs_values(grid, u, f);
  PohozaevReport rep;
  rep.check = "poh1";
  rep.origin = opt.origin;
  rep.equation_residual = equation_gate_check(op, u, fv, opt.equation_gate);

  std::vector<Point> grad = corrected_gradient(u, s);
  double lhs = 0.0, rhsv = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const Point xs = grid.nodes[i] - opt.origin;
    lhs += -2.0 * grid.weights[i] * xs.dot(grad[i]) * fv[i];
    double ui = u.values[i];
    double d = grid.domain->distance(grid.nodes[i]);
    double spacing = grid.dim == 1
                         ? grid.vertices[i + 2] - grid.vertices[i + 1]
                         : grid.h;
    if (d < 3.0 * spacing)
      ui *= cell_distance_moment_ratio(grid, static_cast<int>(i), s);
    rhsv += (n - 2.0 * s) * grid.weights[i] * ui * fv[i];
  }
  rep.lhs_volume = lhs;
  rep.rhs_volume = rhsv;

  BoundaryTerm bt = boundary_integral(op, u, opt, [&](const Point& z, const Point& nu) {
    return (z - opt.origin).dot(nu);
  });
  rep.rhs_boundary = bt.weighted;
  rep.boundary_gross = bt.gross;
  rep.boundary_count = opt.boundary_points;
  rep.residual_abs = std::abs(rep.lhs_volume - rep.rhs_volume - rep.rhs_boundary);
  double scale = std::max({std::abs(rep.lhs_volume),
                           std::abs(rep.rhs_volume) + std::abs(rep.rhs_boundary),
                           rep.boundary_gross, 1e-300});
  rep.residual_rel = rep.residual_abs / scale;
  return rep;
}

PohozaevReport verify_poh2(const OperatorMatrix& op, const GridFunction& u,
                           const PointwiseRhs& f, const Point& e,
                           const PohozaevOptions& opt) {
  const Kernel& ker = op.kernel;
  const double elen = ker.dim == 1 ? std::abs(e[0]) : e.norm();
  require(std::abs(elen - 1.0) < 1e-10, "direction e must be a unit vector");
  const Grid& grid = *op.grid;

  Vector fv = rhs_values(grid, u, f);
  PohozaevReport rep;
  rep.check = "poh2";
  rep.direction = e;
  rep.has_direction = true;
  rep.equation_residual = equation_gate_check(op, u, fv, opt.equation_gate);

  std::vector<Point> grad = corrected_gradient(u, ker.order);
  double lhs = 0.0;
  for (size_t i = 0; i < grid.size(); ++i)
    lhs += -grid.weights[i] * e.dot(grad[i]) * fv[i];
  rep.lhs_volume = lhs;
  rep.rhs_volume = 0.0;

  BoundaryTerm bt = boundary_integral(
      op, u, opt, [&](const Point&, const Point& nu) { return 0.5 * nu.dot(e); });
  rep.rhs_boundary = bt.weighted;
  rep.boundary_gross = bt.gross;
  rep.boundary_count = opt.boundary_points;
  rep.residual_abs = std::abs(rep.lhs_volume - rep.rhs_boundary);
  double scale = std::max({std::abs(rep.lhs_volume), std::abs(rep.rhs_boundary),
                           rep.boundary_gross, 1e-300});
  rep.residual_rel = rep.residual_abs / scale;
  return rep;
}

PohozaevReport f_form_identity(const OperatorMatrix& op, const GridFunction& u,
                               const std::function<double(double)>& f,
                               const std::function<double(double)>& F,
                               const PohozaevOptions& opt) {
  require(std::abs(F(0.0)) < 1e-14, "antiderivative must satisfy F(0) = 0");
  const Grid& grid = *op.grid;
  const Kernel& ker = op.kernel;
  const double s = ker.order;
  const int n = ker.dim;

  PointwiseRhs fx = [&](const Point&, double val) { return f(val); };
  Vector fv = rhs_values(grid, u, fx);
  PohozaevReport rep;
  rep.check = "f_form";
  rep.origin = opt.origin;
  rep.equation_residual = equation_gate_check(op, u, fv, opt.equation_gate);

  double lhs = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    double ui = u.values[i];
    lhs += grid.weights[i] * (2.0 * n * F(ui) - (n - 2.0 * s) * ui * f(ui));
  }
  rep.lhs_volume = lhs;
  rep.rhs_volume = 0.0;

  BoundaryTerm bt = boundary_integral(op, u, opt, [&](const Point& z, const Point& nu) {
    return (z - opt.origin).dot(nu);
  });
  rep.rhs_boundary = bt.weighted;
  rep.boundary_gross = bt.gross;
  rep.boundary_count = opt.boundary_points;
  rep.residual_abs = std::abs(rep.lhs_volume - rep.rhs_boundary);
  double scale = std::max({std::abs(rep.lhs_volume), std::abs(rep.rhs_boundary),
                           rep.boundary_gross, 1e-300});
  rep.residual_rel = rep.residual_abs / scale;
  return rep;
}

ObstructionVerdict nonexistence_verdict(double p, const Kernel& kernel,
                                        const Domain& domain, const Point& origin) {
  require(p > 1.0, "power exponent must satisfy p > 1");
  ObstructionVerdict v;
  v.p = p;
  v.p_critical = critical_exponent(kernel.dim, kernel.order);
  v.coefficient = 2.0 * kernel.dim / (p + 1.0) - (kernel.dim - 2.0 * kernel.order);
  v.star_margin = star_shape_margin(domain, origin);

  if (!std::isfinite(v.p_critical)) {
    v.sign_class = ObstructionVerdict::SignClass::subcritical;
    v.verdict = "no supercritical regime (n <= 2s): every p > 1 is subcritical";
    return v;
  }
  const double tol = 1e-12 * std::max(1.0, v.p_critical);
  if (std::abs(p - v.p_critical) <= tol)
    v.sign_class = ObstructionVerdict::SignClass::critical;
  else if (p > v.p_critical)
    v.sign_class = ObstructionVerdict::SignClass::supercritical;
  else
    v.sign_class = ObstructionVerdict::SignClass::subcritical;

  switch (v.sign_class) {
    case ObstructionVerdict::SignClass::subcritical:
      v.verdict = "subcritical: no obstruction from the identity";
      break;
    case ObstructionVerdict::SignClass::critical:
      v.verdict = v.star_margin > 0
                      ? "critical on a star-shaped domain: the only nonnegative "
                        "solution is zero (volume side vanishes, boundary side > 0)"
                      : "critical, but star-shapedness not certified for this origin";
      break;
    case ObstructionVerdict::SignClass::supercritical:
      v.verdict = v.star_margin > 0
                      ? "supercritical on a star-shaped domain: the only bounded "
                        "solution is zero (volume side < 0, boundary side > 0)"
                      : "supercritical, but star-shapedness not certified for this origin";
      break;
  }
  return v;
}

double unique_continuation_check(const GridFunction& phi, double order,
                                 int boundary_points, const TraceOptions& trace) {
  const Domain& dom = *phi.grid->domain;
  BoundaryQuadrature bq =
      boundary_nodes(dom, phi.grid->dim == 1 ? 2 : boundary_points);
  double lo = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < bq.size(); ++j) {
    TraceSample ts =
        trace_quotient(phi, dom, order, bq.nodes[j], bq.normals[j], trace);
    lo = std::min(lo, std::abs(ts.quotient));
  }
  return lo;
}

}  // namespace fracpoh
