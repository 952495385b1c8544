// Scratch accuracy pilot for the discrete operator (manual runs only).
#include "fracpoh/geometry.hpp"
#include "fracpoh/nonlocal_op.hpp"
#include "fracpoh/solve.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

using namespace fracpoh;

static double wall() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

static int smooth_consistency(int N, double s) {
  Kernel k = Kernel::fractional(2, s);
  Domain dom = Domain::ball(Point(0, 0), 1.0);
  Grid grid = build_grid(dom, N, 1.0);
  OperatorMatrix op = assemble(k, grid);
  Vector u(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    double q = 1.0 - grid.nodes[i].squaredNorm();
    u[i] = q > 0 ? q * q * q * q : 0.0;
  }
  Vector lu = op.apply(u);
  auto uf = [](const Point& x) {
    double q = 1.0 - x.squaredNorm();
    return q > 0 ? q * q * q * q : 0.0;
  };
  QuadratureParams qp;
  qp.scale = 2.0;
  qp.angular_nodes = 128;
  qp.split_radius = 0.004;
  qp.panel_ratio = 1.15;
  qp.radial_breaks = [&dom](const Point& z, const Point& dir, double rmax) {
    return dom.radial_kinks(z, dir, rmax);
  };
  const double probes[4][2] = {{0, 0}, {0.31, 0.13}, {0.52, -0.33}, {-0.11, 0.62}};
  for (auto& pr : probes) {
    Point x(pr[0], pr[1]);
    size_t best = 0;
    double bd = 1e9;
    for (size_t i = 0; i < grid.size(); ++i) {
      double d = (grid.nodes[i] - x).norm();
      if (d < bd) { bd = d; best = i; }
    }
    double ref_at_node = apply_pointwise(k, uf, grid.nodes[best], qp);
    std::printf("probe (%.2f,%.2f): node-ref=%.6f  Mu=%.6f  rel=%.3e\n", pr[0],
                pr[1], ref_at_node, lu[best],
                std::abs(lu[best] - ref_at_node) / std::abs(ref_at_node));
  }
  auto res = solve_linear(op, Vector::Ones(grid.size()));
  const double kappa = torsion_constant(2, s);
  double band[6] = {0, 0, 0, 0, 0, 0};
  for (size_t i = 0; i < grid.size(); ++i) {
    double r = grid.nodes[i].norm();
    double exact = kappa * std::pow(std::max(0.0, 1.0 - r * r), s);
    double err = std::abs(res.u[i] - exact) / kappa;
    double d = 1.0 - r;
    int b = d < 0.03 ? 0 : d < 0.06 ? 1 : d < 0.12 ? 2 : d < 0.25 ? 3 : d < 0.5 ? 4 : 5;
    if (err > band[b]) band[b] = err;
  }
  std::printf("torsion rel err by depth band: %.4f %.4f %.4f %.4f %.4f %.4f\n",
              band[0], band[1], band[2], band[3], band[4], band[5]);
  return 0;
}

int main(int argc, char** argv) {
  if (argc > 5) return smooth_consistency(std::atoi(argv[2]), std::atof(argv[3]));
  int dim = argc > 1 ? std::atoi(argv[1]) : 1;
  int N = argc > 2 ? std::atoi(argv[2]) : 512;
  double s = argc > 3 ? std::atof(argv[3]) : 0.5;
  double beta = argc > 4 ? std::atof(argv[4]) : 2.0;

  Kernel k = Kernel::fractional(dim, s);
  Domain dom = dim == 1 ? Domain::interval(-1, 1) : Domain::ball(Point(0, 0), 1.0);
  double t0 = wall();
  Grid grid = build_grid(dom, N, dim == 1 ? beta : 1.0);
  double t1 = wall();
  OperatorMatrix op = assemble(k, grid);
  double t2 = wall();
  auto res = solve_linear(op, Vector::Ones(grid.size()));
  double t3 = wall();

  const double kappa = torsion_constant(dim, s);
  double err = 0.0, umax = 0.0, err_int = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    double r2 = dim == 1 ? grid.nodes[i][0] * grid.nodes[i][0]
                         : grid.nodes[i].squaredNorm();
    double exact = kappa * std::pow(std::max(0.0, 1.0 - r2), s);
    err = std::max(err, std::abs(res.u[i] - exact));
    if (r2 < 0.9 * 0.9) err_int = std::max(err_int, std::abs(res.u[i] - exact));
    umax = std::max(umax, exact);
  }
  Vector exact_v(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    double r2 = dim == 1 ? grid.nodes[i][0] * grid.nodes[i][0]
                         : grid.nodes[i].squaredNorm();
    exact_v[i] = kappa * std::pow(std::max(0.0, 1.0 - r2), s);
  }
  Vector lu = op.apply(exact_v);
  double consist = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    double r2 = dim == 1 ? grid.nodes[i][0] * grid.nodes[i][0]
                         : grid.nodes[i].squaredNorm();
    if (r2 < 0.8 * 0.8) consist = std::max(consist, std::abs(lu[i] - 1.0));
  }

  std::printf(
      "dim=%d N=%d s=%.3g beta=%.2g nodes=%zu  relLinf=%.4e relLinf(int)=%.4e "
      "consist(int)=%.3e  grid=%.2fs asm=%.2fs solve=%.2fs iters=%d\n",
      dim, N, s, beta, grid.size(), err / umax, err_int / umax, consist, t1 - t0,
      t2 - t1, t3 - t2, res.iterations);
  return 0;
}
