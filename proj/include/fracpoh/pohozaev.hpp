#pragma once

#include "fracpoh/nonlocal_op.hpp"
#include "fracpoh/solve.hpp"
#include "fracpoh/trace.hpp"

#include <functional>
#include <string>

namespace fracpoh {

using PointwiseRhs = std::function<double(const Point&, double)>;  // f(x, u)

struct PohozaevOptions {
  Point origin = Point::Zero();
  int boundary_points = 256;
  TraceOptions trace;
  // Relative algebraic residual ||Bu - Wf|| / ||Wf|| above which u is
  // rejected as a non-solution (substituting f for Lu would be invalid).
  double equation_gate = 0.02;
};

struct PohozaevReport {
  std::string check;
  double lhs_volume = 0.0;    // -2 int (x.grad u) Lu   (or -int d_e u Lu)
  double rhs_volume = 0.0;    // (n-2s) int u Lu
  double rhs_boundary = 0.0;  // Gamma(1+s)^2 int A(nu) (u/d^s)^2 (x.nu) dsigma
  double residual_abs = 0.0;
  double residual_rel = 0.0;
  double boundary_gross = 0.0;  // same boundary integral with |x.nu| (scale)
  Point origin = Point::Zero();
  Point direction = Point::Zero();
  bool has_direction = false;
  double equation_residual = 0.0;
  int boundary_count = 0;
};

// Nodal gradient of a solution: centered differences away from the boundary
// and the Q d^s profile (with a cell-averaged d^{s-1} factor) in the
// boundary layer, where plain differences cannot see the singular slope.
std::vector<Point> corrected_gradient(const GridFunction& u, double order);

PohozaevReport verify_poh1(const OperatorMatrix& op, const GridFunction& u,
                           const PointwiseRhs& f, const PohozaevOptions& = {});

PohozaevReport verify_poh2(const OperatorMatrix& op, const GridFunction& u,
                           const PointwiseRhs& f, const Point& e,
                           const PohozaevOptions& = {});

// Autonomous form: int {2n F(u) - (n-2s) u f(u)} against the boundary term;
// no gradient of u is needed, so this is the preferred route for rough
// solutions.
PohozaevReport f_form_identity(const OperatorMatrix& op, const GridFunction& u,
                               const std::function<double(double)>& f,
                               const std::function<double(double)>& F,
                               const PohozaevOptions& = {});

struct ObstructionVerdict {
  double p = 0.0;
  double p_critical = 0.0;  // +infinity when n <= 2s
  double coefficient = 0.0; // 2n/(p+1) - (n-2s)
  enum class SignClass { subcritical, critical, supercritical } sign_class =
      SignClass::subcritical;
  double star_margin = 0.0;
  double boundary_term = 0.0;  // boundary integral when a solution is supplied
  std::string verdict;
};

ObstructionVerdict nonexistence_verdict(double p, const Kernel& kernel,
                                        const Domain& domain,
                                        const Point& origin = Point::Zero());

// min over boundary nodes of |phi/d^s|; strictly positive output witnesses a
// nonvanishing eigenfunction trace.
double unique_continuation_check(const GridFunction& phi, double order,
                                 int boundary_points = 256,
                                 const TraceOptions& trace = {});

}  // namespace fracpoh
