#pragma once

#include "fracpoh/common.hpp"
#include "fracpoh/geometry.hpp"
#include "fracpoh/kernel.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace fracpoh {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

// Values of u on interior grid nodes, extended by zero outside Omega.
struct GridFunction {
  std::shared_ptr<const Grid> grid;
  Vector values;

  GridFunction() = default;
  GridFunction(std::shared_ptr<const Grid> g, Vector v);

  // P1 (1-D) / bilinear (2-D) interpolation, exact zero outside Omega's
  // node cover.
  double eval(const Point& x) const;
  ScalarField as_field() const;
  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

// Controls for the pointwise singular quadrature.
struct QuadratureParams {
  double split_radius = 0.0;    // near-field radius h; 0 -> 0.02 * scale
  double cutoff = 0.0;          // far-field radius R; 0 -> cutoff_factor * scale
  double split_radius_factor = 2.0;   // h as multiple of local node spacing
  double cutoff_factor = 4.0;         // R as multiple of the domain diameter
  double scale = 1.0;           // length scale when no domain is at hand
  int angular_nodes = 64;       // 2-D angular resolution
  double panel_ratio = 1.4;     // geometric radial panel growth
  int gauss_order = 8;
  int refine_level = 0;         // level L: h/2^L, ratio->1+(ratio-1)/2^L, angles*2^L
  bool growth_tail = false;     // integrate u beyond R instead of assuming 0
  double smooth_radius = 0.0;   // clamp h below the nearest kink when known
  // Radii where the integrand kinks along a given direction (both +dir and
  // -dir matter since the scheme is symmetrized).
  std::function<std::vector<double>(const Point& x, const Point& dir, double rmax)>
      radial_breaks;

  QuadratureParams refined(int level) const;
  double effective_split(double fallback_scale) const;
  double effective_cutoff(double fallback_scale) const;
};

// Lu(x) through the symmetrized form
//   (1/2) \int (2u(x) - u(x+y) - u(x-y)) K(y) dy
// with a second-order Taylor surrogate on |y| < h, geometric Gauss panels on
// h <= |y| <= R, and either the exact zero-extension tail or a substituted
// quadrature of the growth tail beyond R.
double apply_pointwise(const Kernel& kernel, const ScalarField& u,
                       const Point& x, const QuadratureParams& params = {});

// Discrete operator.  The stored array `form` (dense) or the lattice
// coupling table (matrix-free) is symmetric by construction; the nodal
// action is apply(u) = W^{-1} (form u) with W the operator metric `mass`.
//
// 1-D: exact P1 Galerkin stiffness of the Dirichlet form on the graded mesh.
// 2-D: translation-invariant cell quadrature on the uniform lattice with a
//      near-diagonal Taylor correction, scaled by sqrt(w_i w_j).
struct OperatorMatrix {
  std::shared_ptr<const Grid> grid;
  Kernel kernel;
  Vector mass;        // W
  bool dense = true;
  Matrix form;        // B, dense storage

  // lattice data (2-D; also kept when dense for entry bookkeeping)
  int coupling_range = 0;               // offsets |dk| <= range
  std::vector<double> coupling;         // kernel cell masses C(dk)
  double diag_coeff = 0.0;              // sum_k C + exterior tail mass
  std::vector<double> taylor;           // 3x3 near-field stencil, center = diag
  std::vector<unsigned char> regular;   // Taylor stencil applies (both ends)
  Vector boundary_diag;                 // d^s-profile diagonal correction

  double split_radius = 0.0;  // metadata
  double cutoff = 0.0;

  size_t size() const { return mass.size(); }
  double entry(Eigen::Index i, Eigen::Index j) const;  // B_ij
  Vector form_apply(const Vector& u) const;            // B u
  Vector apply(const Vector& u) const;                 // W^{-1} B u ~ Lu(x_i)
  double form_energy(const Vector& u) const;           // u^T B u
};

struct AssembleOptions {
  size_t dense_node_limit = 5200;   // switch to matrix-free above this
  size_t max_nodes = 40000;         // refuse outright above this
  int near_cell_range = 3;          // 2-D: refined kernel moments |k|_inf <= range
  int boundary_window = 4;          // 2-D: d^s-profile correction window
};

OperatorMatrix assemble(const Kernel& kernel, const Grid& grid,
                        const AssembleOptions& options = {});

// max over probes of |L(x.grad u) - x.grad(Lu) - 2s Lu|; `scale` carries the
// size of the 2s Lu term for relative reporting.
struct ScalingIdentityResult {
  double residual = 0.0;
  double scale = 0.0;
};
ScalingIdentityResult scaling_identity_residual(
    const Kernel& kernel, const ScalarField& u, const VectorField& grad_u,
    const std::vector<Point>& probes, const QuadratureParams& params = {});

// Both sides of 2\int (x.grad u) Lu = (2s - n)\int u Lu for u compactly
// supported strictly inside the grid's domain, by grid quadrature.
std::pair<double, double> compact_support_identity_residual(
    const Kernel& kernel, const ScalarField& u, const VectorField& grad_u,
    const Grid& grid, const QuadratureParams& params = {});

// max |L(d^s)| over interior probes (regularized distance of the domain).
double lds_bound_check(const Kernel& kernel, const Domain& domain,
                       const std::vector<Point>& probes,
                       const QuadratureParams& params = {});

// max |L((x.e)_+^s)| over probes in the half-space {x.e > 0}.
double halfspace_harmonicity_residual(const Kernel& kernel, const Point& e,
                                      const std::vector<Point>& probes,
                                      const QuadratureParams& params = {});

}  // namespace fracpoh
