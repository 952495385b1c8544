#include "fracpoh/nonlocal_op.hpp"

#include "fracpoh/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracpoh {

GridFunction::GridFunction(std::shared_ptr<const Grid> g, Vector v)
    : grid(std::move(g)), values(std::move(v)) {
  require(static_cast<size_t>(values.size()) == grid->size(),
          "grid function length must match the grid node count");
  require(values.allFinite(), "grid function values must be finite");
}

double GridFunction::eval(const Point& x) const {
  const Grid& g = *grid;
  if (g.dim == 1) {
    const auto& v = g.vertices;
    if (x[0] <= v.front() || x[0] >= v.back()) return 0.0;
    auto it = std::upper_bound(v.begin(), v.end(), x[0]);
    size_t j = static_cast<size_t>(it - v.begin());  // v[j-1] < x <= v[j]
    if (j == 0 || j >= v.size()) return 0.0;
    double lo = v[j - 1], hi = v[j];
    double t = (x[0] - lo) / (hi - lo);
    auto nodal = [&](size_t vtx) -> double {
      if (vtx == 0 || vtx + 1 == v.size()) return 0.0;
      return values[static_cast<Eigen::Index>(vtx - 1)];
    };
    return (1.0 - t) * nodal(j - 1) + t * nodal(j);
  }
  // 2-D bilinear between lattice cell centers, zero at missing nodes.
  double fx = (x[0] - g.cell0[0]) / g.h;
  double fy = (x[1] - g.cell0[1]) / g.h;
  int ix = static_cast<int>(std::floor(fx));
  int iy = static_cast<int>(std::floor(fy));
  double tx = fx - ix, ty = fy - iy;
  auto nodal = [&](int jx, int jy) -> double {
    int n = g.node_at(jx, jy);
    return n < 0 ? 0.0 : values[n];
  };
  return (1 - tx) * (1 - ty) * nodal(ix, iy) + tx * (1 - ty) * nodal(ix + 1, iy) +
         (1 - tx) * ty * nodal(ix, iy + 1) + tx * ty * nodal(ix + 1, iy + 1);
}

ScalarField GridFunction::as_field() const {
  GridFunction copy = *this;
  return [copy](const Point& x) { return copy.eval(x); };
}

QuadratureParams QuadratureParams::refined(int level) const {
  QuadratureParams p = *this;
  p.refine_level += level;
  return p;
}

double QuadratureParams::effective_split(double fallback_scale) const {
  double h = split_radius > 0 ? split_radius : 0.02 * (scale > 0 ? scale : fallback_scale);
  h *= std::pow(0.5, refine_level);
  if (smooth_radius > 0) h = std::min(h, 0.45 * smooth_radius);
  return h;
}

double QuadratureParams::effective_cutoff(double fallback_scale) const {
  double R = cutoff > 0 ? cutoff
                        : cutoff_factor * (scale > 0 ? scale : fallback_scale);
  return R;
}

namespace {

// Second derivative along axis `a` by centered differences.
double fd_second(const ScalarField& u, const Point& x, int a, double step) {
  Point xp = x, xm = x;
  xp[a] += step;
  xm[a] -= step;
  return (u(xp) - 2.0 * u(x) + u(xm)) / (step * step);
}

double fd_cross(const ScalarField& u, const Point& x, double step) {
  Point pp = x, pm = x, mp = x, mm = x;
  pp[0] += step; pp[1] += step;
  pm[0] += step; pm[1] -= step;
  mp[0] -= step; mp[1] += step;
  mm[0] -= step; mm[1] -= step;
  return (u(pp) + u(mm) - u(pm) - u(mp)) / (4.0 * step * step);
}

// Radial integral of g(r) r^{-1-2s} over [R, infinity) by the substitution
// r = R v^{-1/s}; smooth for growth up to r^s and integrable below r^{2s}.
double growth_tail_radial(const std::function<double(double)>& g, double R,
                          double s, const std::vector<double>& kinks,
                          int gauss_order) {
  std::vector<double> vbreaks{0.0, 1.0};
  for (double rk : kinks)
    if (rk > R) vbreaks.push_back(std::pow(R / rk, s));
  auto integrand = [&](double v) {
    if (v <= 0.0) return 0.0;
    double r = R * std::pow(v, -1.0 / s);
    return g(r) * v;  // g(r) r^{-1-2s} dr = (R^{-2s}/s) g(r) v dv
  };
  double total = segmented_integrate(integrand, 0.0, 1.0, vbreaks,
                                     std::max(16, gauss_order * 2));
  return std::pow(R, -2.0 * s) / s * total;
}

}  // namespace

double apply_pointwise(const Kernel& kernel, const ScalarField& u,
                       const Point& x, const QuadratureParams& params) {
  const double s = kernel.order;
  const int n = kernel.dim;
  const double h = params.effective_split(1.0);
  const double R = params.effective_cutoff(1.0);
  require(h > 0 && R > h, "quadrature needs 0 < split radius < cutoff");

  const double ratio = 1.0 + (params.panel_ratio - 1.0) * std::pow(0.5, params.refine_level);
  const int gauss = params.gauss_order;
  const double ux = u(x);

  // Near field: exact second moment of K over |y| < h against the FD Hessian.
  const Eigen::Matrix2d mom = kernel.angular_second_moment();
  const double ball_factor = std::pow(h, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
  const double fd = 0.5 * h;
  double near;
  if (n == 1) {
    near = -0.5 * ball_factor * mom(0, 0) * fd_second(u, x, 0, fd);
  } else {
    double hxx = fd_second(u, x, 0, fd), hyy = fd_second(u, x, 1, fd);
    double hxy = fd_cross(u, x, fd);
    near = -0.5 * ball_factor * (mom(0, 0) * hxx + mom(1, 1) * hyy + 2.0 * mom(0, 1) * hxy);
  }

  // Far field plus tail, direction by direction.
  auto radial_part = [&](const Point& dir, double a_theta) {
    std::vector<double> kinks;
    if (params.radial_breaks) {
      auto k1 = params.radial_breaks(x, dir, R * 1e6);
      auto k2 = params.radial_breaks(x, -dir, R * 1e6);
      kinks.insert(kinks.end(), k1.begin(), k1.end());
      kinks.insert(kinks.end(), k2.begin(), k2.end());
      std::sort(kinks.begin(), kinks.end());
    }
    auto g = [&](double r) {
      Point y = r * dir;
      return ux - 0.5 * (u(x + y) + u(x - y));
    };
    std::vector<double> mid_kinks;
    for (double rk : kinks)
      if (rk > h && rk < R) mid_kinks.push_back(rk);
    auto edges = geometric_panels(h, R, ratio, mid_kinks);
    double far = 0.0;
    auto fr = [&](double r) { return 2.0 * g(r) * std::pow(r, -1.0 - 2.0 * s); };
    for (size_t i = 0; i + 1 < edges.size(); ++i)
      far += gauss_integrate(fr, edges[i], edges[i + 1], gauss);

    double tail;
    if (params.growth_tail) {
      auto gr = [&](double r) { return 2.0 * g(r); };
      tail = growth_tail_radial(gr, R, s, kinks, gauss);
    } else {
      tail = 2.0 * ux * std::pow(R, -2.0 * s) / (2.0 * s);
    }
    return a_theta * (far + tail);
  };

  double total = near;
  if (n == 1) {
    // One-sided radial integral of the full second difference; the kernel
    // evenness has already merged the two points of S^0.
    double a_avg = 0.5 * (kernel.density.eval_1d(1) + kernel.density.eval_1d(-1));
    total += radial_part(Point(1.0, 0.0), a_avg);
  } else {
    const int m = std::max(8, params.angular_nodes << params.refine_level);
    double sum = 0.0;
    for (int q = 0; q < m; ++q) {
      double theta = 2.0 * std::numbers::pi * (q + 0.5) / m;
      Point dir(std::cos(theta), std::sin(theta));
      sum += radial_part(dir, kernel.density.eval(theta));
    }
    total += 0.5 * sum * (2.0 * std::numbers::pi / m);
  }
  return total;
}

ScalingIdentityResult scaling_identity_residual(
    const Kernel& kernel, const ScalarField& u, const VectorField& grad_u,
    const std::vector<Point>& probes, const QuadratureParams& params) {
  const double s = kernel.order;
  ScalarField xgrad = [&](const Point& z) { return z.dot(grad_u(z)); };
  ScalingIdentityResult out;
  const double fd = 5e-4 * std::max(1.0, params.scale);
  for (const Point& x : probes) {
    double lhs = apply_pointwise(kernel, xgrad, x, params);
    double lu = apply_pointwise(kernel, u, x, params);
    double xglu = 0.0;
    for (int a = 0; a < kernel.dim; ++a) {
      Point xp = x, xm = x;
      xp[a] += fd;
      xm[a] -= fd;
      xglu += x[a] * (apply_pointwise(kernel, u, xp, params) -
                      apply_pointwise(kernel, u, xm, params)) /
              (2.0 * fd);
    }
    double rhs = xglu + 2.0 * s * lu;
    out.residual = std::max(out.residual, std::abs(lhs - rhs));
    out.scale = std::max({out.scale, std::abs(2.0 * s * lu), std::abs(lhs)});
  }
  return out;
}

std::pair<double, double> compact_support_identity_residual(
    const Kernel& kernel, const ScalarField& u, const VectorField& grad_u,
    const Grid& grid, const QuadratureParams& params) {
  const Domain& dom = *grid.domain;
  // The identity needs supp u strictly inside Omega.
  double umax = 0.0, uedge = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    double val = std::abs(u(grid.nodes[i]));
    umax = std::max(umax, val);
    if (dom.distance(grid.nodes[i]) < 0.05 * dom.inradius())
      uedge = std::max(uedge, val);
  }
  if (umax > 0 && uedge > 1e-12 * umax)
    throw parameter_error("compact-support identity requires supp u strictly inside the domain");

  QuadratureParams p = params;
  if (p.scale <= 1.0) p.scale = dom.diameter();
  double lhs = 0.0, rhs = 0.0;
  const double s = kernel.order;
  for (size_t i = 0; i < grid.size(); ++i) {
    const Point& xi = grid.nodes[i];
    double lu = apply_pointwise(kernel, u, xi, p);
    lhs += 2.0 * grid.weights[i] * xi.dot(grad_u(xi)) * lu;
    rhs += (2.0 * s - kernel.dim) * grid.weights[i] * u(xi) * lu;
  }
  return {lhs, rhs};
}

double lds_bound_check(const Kernel& kernel, const Domain& domain,
                       const std::vector<Point>& probes,
                       const QuadratureParams& params) {
  const double s = kernel.order;
  ScalarField ds = [&domain, s](const Point& z) {
    double d = domain.distance(z);
    return d > 0 ? std::pow(d, s) : 0.0;
  };
  double worst = 0.0;
  for (const Point& x : probes) {
    require(domain.inside(x), "lds_bound_check probes must be interior");
    QuadratureParams p = params;
    if (p.scale <= 1.0) p.scale = domain.diameter();
    p.smooth_radius = domain.exact_distance(x);
    p.radial_breaks = [&domain](const Point& z, const Point& dir, double rmax) {
      return domain.radial_kinks(z, dir, rmax);
    };
    worst = std::max(worst, std::abs(apply_pointwise(kernel, ds, x, p)));
  }
  return worst;
}

double halfspace_harmonicity_residual(const Kernel& kernel, const Point& e,
                                      const std::vector<Point>& probes,
                                      const QuadratureParams& params) {
  const double s = kernel.order;
  const double elen = kernel.dim == 1 ? std::abs(e[0]) : e.norm();
  require(std::abs(elen - 1.0) < 1e-10, "half-space direction must be a unit vector");
  ScalarField profile = [e, s](const Point& z) {
    double t = z.dot(e);
    return t > 0 ? std::pow(t, s) : 0.0;
  };
  double worst = 0.0;
  for (const Point& x : probes) {
    const double t = x.dot(e);
    require(t > 0, "half-space probes must satisfy x.e > 0");
    QuadratureParams p = params;
    p.growth_tail = true;
    if (p.scale <= 1.0) p.scale = std::max(1.0, 2.0 * t);
    p.smooth_radius = t;
    p.radial_breaks = [e](const Point& z, const Point& dir, double rmax) {
      std::vector<double> out;
      double de = dir.dot(e);
      if (std::abs(de) > 1e-14) {
        double r = -z.dot(e) / de;
        if (r > 0 && r < rmax) out.push_back(r);
      }
      return out;
    };
    worst = std::max(worst, std::abs(apply_pointwise(kernel, profile, x, p)));
  }
  return worst;
}

}  // namespace fracpoh
