#pragma once

#include "fracpoh/common.hpp"

#include <memory>
#include <vector>

namespace fracpoh {

// Bounded C^{1,1} domain with a regularized interior distance.
//
// d(x) equals dist(x, complement) within distance_cap/2 of the boundary and
// plateaus at distance_cap further inside through a C^{1,1} quadratic blend
// on [cap/2, 3cap/2]; the plateau removes the medial-axis kinks of the exact
// distance (interval midpoint, ball center, annulus ridge).
class Domain {
 public:
  enum class Shape { interval, ball, ellipse, annulus };

  static Domain interval(double a, double b, double distance_cap = 0.0);
  static Domain ball(const Point& center, double radius, double distance_cap = 0.0);
  static Domain ellipse(const Point& center, double ax, double ay,
                        double distance_cap = 0.0);
  static Domain annulus(double r_in, double r_out, double distance_cap = 0.0);

  Shape shape() const { return shape_; }
  int dim() const { return dim_; }
  double distance_cap() const { return cap_; }
  double param0() const { return p0_; }
  double param1() const { return p1_; }
  const Point& center() const { return center_; }

  bool inside(const Point& x) const;        // strict interior
  double exact_distance(const Point& x) const;  // dist to complement, 0 outside
  double distance(const Point& x) const;        // regularized d(x)
  Point distance_gradient(const Point& x) const;  // finite-difference safe grad

  double area() const;      // |Omega| (length in 1-D)
  double inradius() const;
  double diameter() const;
  double perimeter() const;

  // Radii r in (0, rmax] where x + r dir crosses the boundary or a
  // cap-transition level set; quadrature panels split there so the d^s cusp
  // never sits inside a smooth panel.
  std::vector<double> radial_kinks(const Point& x, const Point& dir,
                                   double rmax) const;

 private:
  Shape shape_ = Shape::interval;
  int dim_ = 1;
  Point center_ = Point::Zero();
  double p0_ = 0.0, p1_ = 0.0;  // interval: a,b; ball: r,-; ellipse: ax,ay; annulus: r_in,r_out
  double cap_ = 0.0;

  double cap_blend(double t) const;
};

// Boundary quadrature: nodes, outward unit normals, surface weights.
// 1-D convention: the two endpoints with counting weight 1 each.
struct BoundaryQuadrature {
  std::vector<Point> nodes;
  std::vector<Point> normals;
  std::vector<double> weights;
  size_t size() const { return nodes.size(); }
};

BoundaryQuadrature boundary_nodes(const Domain& domain, int m);

// min over boundary samples of (z - origin) . nu(z); positive output
// certifies strict star-shapedness with respect to origin.
double star_shape_margin(const Domain& domain, const Point& origin,
                         int samples = 2048);

// Interior quadrature grid.
//
// 1-D: mesh vertices from the symmetric grading map xi -> (2 xi)^beta / 2,
// interior vertices are the nodes; covering-cell weights sum to |Omega|
// exactly, lumped hat masses drive the operator metric.
//
// 2-D: uniform cell-centered lattice over the bounding box; nodes are cell
// centers strictly inside Omega with cut-cell areas as weights.  Only
// grading 1 is supported in 2-D (the discrete operator needs the uniform
// lattice for its translation-invariant symmetric assembly).
struct Grid {
  int dim = 1;
  int resolution = 0;     // N (per axis in 2-D)
  double grading = 1.0;

  std::vector<Point> nodes;
  Vector weights;         // covering-cell quadrature weights, sum -> |Omega|
  Vector mass;            // operator metric (1-D lumped hats; 2-D == weights)

  // 1-D mesh data
  std::vector<double> vertices;  // v_0 .. v_{N+1} including boundary

  // 2-D lattice data
  double h = 0.0;
  int nx = 0, ny = 0;
  Point cell0 = Point::Zero();      // center of lattice cell (0,0)
  std::vector<int> node_of_cell;    // nx*ny -> node index or -1

  std::shared_ptr<const Domain> domain;

  size_t size() const { return nodes.size(); }
  int cell_index(int ix, int iy) const { return ix + nx * iy; }
  // Nearest-cell lookup for a point; -1 when outside the lattice box.
  int node_at(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return -1;
    return node_of_cell[cell_index(ix, iy)];
  }
};

Grid build_grid(const Domain& domain, int resolution, double grading = 2.0);

// Mean of d(x)^gamma over the node's covering cell divided by d(node)^gamma.
// Used as a boundary-layer sampling correction for d^{gamma}-type integrands;
// equals 1 away from the boundary.
double cell_distance_moment_ratio(const Grid& grid, int node, double gamma);

}  // namespace fracpoh
