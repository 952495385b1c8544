#include "fracpoh/nonlocal_op.hpp"
#include "fracpoh/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace fracpoh {

namespace {

// Stable \int_lo^hi t^e dt, including e near -1 (log branch).
double power_integral(double e, double lo, double hi) {
  const double ep1 = e + 1.0;
  if (lo <= 0.0) {
    if (ep1 <= 0.0) throw numerical_error("divergent power integral");
    return std::pow(hi, ep1) / ep1;
  }
  if (std::abs(ep1) < 1e-9) {
    // (hi^ep1 - lo^ep1)/ep1 -> log(hi/lo) as ep1 -> 0, via expm1.
    double lh = std::log(hi), ll = std::log(lo);
    if (ep1 == 0.0) return lh - ll;
    return (std::expm1(ep1 * lh) - std::expm1(ep1 * ll)) / ep1;
  }
  return (std::pow(hi, ep1) - std::pow(lo, ep1)) / ep1;
}

// ---------------------------------------------------------------------------
// 1-D: exact P1 Galerkin stiffness of the Dirichlet form on a graded mesh.
// ---------------------------------------------------------------------------

struct Hat {
  // phi(x) = alpha + beta x on a segment, zero elsewhere.
  double alpha = 0.0, beta = 0.0;
  double eval(double x) const { return alpha + beta * x; }
};

// Restriction of the vertex hat `vtx` to segment [vl, vr] = [v[k-1], v[k]].
Hat hat_on_segment(const std::vector<double>& v, size_t vtx, size_t k) {
  Hat h;
  double vl = v[k - 1], vr = v[k];
  double len = vr - vl;
  if (vtx == k) {  // rising
    h.beta = 1.0 / len;
    h.alpha = -vl / len;
  } else if (vtx == k - 1) {  // falling
    h.beta = -1.0 / len;
    h.alpha = vr / len;
  }
  return h;
}

Matrix assemble_1d_form(const Kernel& kernel, const Grid& grid) {
  const double s = kernel.order;
  const double ka = kernel.density.eval_1d(1);
  const auto& v = grid.vertices;
  const int N = static_cast<int>(grid.size());
  const size_t m = v.size() - 1;  // segments 1..m
  Matrix B = Matrix::Zero(N, N);

  auto dof = [&](size_t vtx) -> int {
    return (vtx >= 1 && vtx <= static_cast<size_t>(N)) ? static_cast<int>(vtx) - 1 : -1;
  };
  auto add = [&](size_t vi, size_t vj, double val) {
    int i = dof(vi), j = dof(vj);
    if (i < 0 || j < 0) return;
    B(i, j) += val;
    if (i != j) B(j, i) += val;
  };

  // Same-segment contribution: slopes against the exact kernel moment.
  for (size_t k = 1; k <= m; ++k) {
    double h = v[k] - v[k - 1];
    double coeff = ka * std::pow(h, 3.0 - 2.0 * s) /
                   ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
    double slope[2] = {-1.0 / h, 1.0 / h};  // hats k-1, k
    size_t vtx[2] = {k - 1, k};
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b)
        add(vtx[a], vtx[b], slope[a] * slope[b] * coeff);
  }

  // Cross-segment contribution through the strip integral in t = y - x.
  // Psi_ij(t) is an exact piecewise cubic; each piece is fitted from four
  // samples and integrated against ka t^{-1-2s} piece by piece.
  const std::array<double, 4> cheb = {
      std::cos(7.0 * std::numbers::pi / 8.0), std::cos(5.0 * std::numbers::pi / 8.0),
      std::cos(3.0 * std::numbers::pi / 8.0), std::cos(1.0 * std::numbers::pi / 8.0)};
  Eigen::Matrix4d vand;
  for (int q = 0; q < 4; ++q)
    for (int p = 0; p < 4; ++p) vand(q, p) = std::pow(cheb[q], p);
  const Eigen::Matrix4d vinv = vand.inverse();
  const GaussRule& g20 = gauss_rule(20);
  const GaussRule& g2 = gauss_rule(2);

  for (size_t k = 1; k <= m; ++k) {
    const double a = v[k - 1], b = v[k];
    for (size_t l = k + 1; l <= m; ++l) {
      const double c = v[l - 1], d = v[l];
      std::array<size_t, 4> hats = {k - 1, k, l - 1, l};
      size_t nh = (l == k + 1) ? 3 : 4;  // shared vertex when adjacent
      if (l == k + 1) hats = {k - 1, k, l, l};
      bool any_dof = false;
      for (size_t t = 0; t < nh; ++t) any_dof |= dof(hats[t]) >= 0;
      if (!any_dof) continue;

      std::array<Hat, 4> on_k, on_l;
      for (size_t t = 0; t < nh; ++t) {
        on_k[t] = hat_on_segment(v, hats[t], k);
        on_l[t] = hat_on_segment(v, hats[t], l);
      }

      // Difference factors D_i(x, t) = phi_i|_k(x) - phi_i|_l(x + t) sampled
      // at the two inner Gauss points of the strip S(t).
      auto psi_samples = [&](double t, std::array<std::array<double, 2>, 4>& dval,
                             double& len) {
        double lo = std::max(a, c - t), hi = std::min(b, d - t);
        len = hi - lo;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int q = 0; q < 2; ++q) {
          double x = mid + half * g2.nodes[q];
          for (size_t tt = 0; tt < nh; ++tt)
            dval[tt][q] = on_k[tt].eval(x) - on_l[tt].eval(x + t);
        }
      };

      std::array<double, 5> edges = {c - b, std::min(c - a, d - b),
                                     std::max(c - a, d - b), d - a, 0.0};
      size_t ne = 4;
      for (size_t piece = 0; piece + 1 < ne; ++piece) {
        double t0 = edges[piece], t1 = edges[piece + 1];
        if (t1 - t0 < 1e-15 * (1.0 + std::abs(t1))) continue;

        if (t0 <= 1e-15 * (b - a)) {
          // Adjacent first piece: Psi_ij(t) = C_ij t^3 exactly.
          double tm = 0.5 * t1;
          std::array<std::array<double, 2>, 4> dval;
          double len;
          psi_samples(tm, dval, len);
          double half = 0.5 * len;
          for (size_t ti = 0; ti < nh; ++ti)
            for (size_t tj = ti; tj < nh; ++tj) {
              double psi = 0.0;
              for (int q = 0; q < 2; ++q)
                psi += g2.weights[q] * dval[ti][q] * dval[tj][q];
              psi *= half;
              double cij = psi / (tm * tm * tm);
              double val = ka * cij * std::pow(t1, 3.0 - 2.0 * s) / (3.0 - 2.0 * s);
              add(hats[ti], hats[tj], val);
            }
          continue;
        }

        // Kernel moments of tau^p over the piece, split to keep panel
        // endpoint ratios modest near t = 0.
        const double tm = 0.5 * (t0 + t1), th = 0.5 * (t1 - t0);
        std::array<double, 4> mu = {0, 0, 0, 0};
        int nsplit = t1 / t0 > 4.0 ? 4 : 1;
        for (int sp = 0; sp < nsplit; ++sp) {
          double q0 = t0 * std::pow(t1 / t0, static_cast<double>(sp) / nsplit);
          double q1 = t0 * std::pow(t1 / t0, static_cast<double>(sp + 1) / nsplit);
          double qm = 0.5 * (q0 + q1), qh = 0.5 * (q1 - q0);
          for (int g = 0; g < 20; ++g) {
            double t = qm + qh * g20.nodes[g];
            double w = qh * g20.weights[g] * ka * std::pow(t, -1.0 - 2.0 * s);
            double tau = (t - tm) / th, tp = 1.0;
            for (int p = 0; p < 4; ++p) {
              mu[p] += w * tp;
              tp *= tau;
            }
          }
        }

        // Fit the cubic from four Chebyshev samples.
        std::array<std::array<std::array<double, 2>, 4>, 4> dvals;
        std::array<double, 4> lens;
        for (int q = 0; q < 4; ++q) {
          double t = tm + th * cheb[q];
          psi_samples(t, dvals[q], lens[q]);
        }
        for (size_t ti = 0; ti < nh; ++ti)
          for (size_t tj = ti; tj < nh; ++tj) {
            if (dof(hats[ti]) < 0 && dof(hats[tj]) < 0) continue;
            Eigen::Vector4d samples;
            for (int q = 0; q < 4; ++q) {
              double psi = 0.0;
              for (int g = 0; g < 2; ++g)
                psi += g2.weights[g] * dvals[q][ti][g] * dvals[q][tj][g];
              samples[q] = psi * 0.5 * lens[q];
            }
            Eigen::Vector4d coef = vinv * samples;
            double val = coef[0] * mu[0] + coef[1] * mu[1] + coef[2] * mu[2] +
                         coef[3] * mu[3];
            add(hats[ti], hats[tj], val);
          }
      }
    }
  }

  // Exterior pairing: \int phi_i phi_j omega with
  // omega(x) = ka [ (x-alpha)^{-2s} + (beta-x)^{-2s} ] / (2s).
  // Hat products are expanded in boundary-shifted coordinates so the
  // coefficient of the non-integrable power vanishes exactly on the
  // boundary-touching segments.
  const double alpha = v.front(), beta_v = v.back();
  for (size_t k = 1; k <= m; ++k) {
    size_t vtx[2] = {k - 1, k};
    Hat hk[2] = {hat_on_segment(v, k - 1, k), hat_on_segment(v, k, k)};
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b2 = a2; b2 < 2; ++b2) {
        if (dof(vtx[a2]) < 0 || dof(vtx[b2]) < 0) continue;
        double total = 0.0;
        // Left term in xi = x - alpha: phi(x) = p0 + p1 xi.
        {
          double p0a = hk[a2].eval(alpha), p1a = hk[a2].beta;
          double p0b = hk[b2].eval(alpha), p1b = hk[b2].beta;
          double q0 = p0a * p0b, q1 = p0a * p1b + p1a * p0b, q2 = p1a * p1b;
          double lo = v[k - 1] - alpha, hi = v[k] - alpha;
          if (lo > 0.0) total += q0 * power_integral(-2.0 * s, lo, hi);
          total += q1 * power_integral(1.0 - 2.0 * s, lo, hi);
          total += q2 * power_integral(2.0 - 2.0 * s, lo, hi);
        }
        // Right term in eta = beta - x: phi(x) = r0 + r1 eta.
        {
          double r0a = hk[a2].eval(beta_v), r1a = -hk[a2].beta;
          double r0b = hk[b2].eval(beta_v), r1b = -hk[b2].beta;
          double q0 = r0a * r0b, q1 = r0a * r1b + r1a * r0b, q2 = r1a * r1b;
          double lo = beta_v - v[k], hi = beta_v - v[k - 1];
          if (lo > 0.0) total += q0 * power_integral(-2.0 * s, lo, hi);
          total += q1 * power_integral(1.0 - 2.0 * s, lo, hi);
          total += q2 * power_integral(2.0 - 2.0 * s, lo, hi);
        }
        add(vtx[a2], vtx[b2], total * ka / (2.0 * s));
      }
  }

  return B;
}

// ---------------------------------------------------------------------------
// 2-D: translation-invariant cell quadrature on the uniform lattice.
// ---------------------------------------------------------------------------

// Mass and second moment of K over the square cell centered at (cx, cy):
// m = \int_cell K, S_ab = \int_cell y_a y_b K.
struct CellMoments {
  double mass = 0.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
};

CellMoments cell_kernel_moments(const Kernel& kernel, double cx, double cy,
                                double half, int order) {
  const GaussRule& g = gauss_rule(order);
  const double s = kernel.order;
  CellMoments out;
  for (int qx = 0; qx < order; ++qx)
    for (int qy = 0; qy < order; ++qy) {
      double x = cx + half * g.nodes[qx];
      double y = cy + half * g.nodes[qy];
      double r2 = x * x + y * y;
      double a = kernel.density.eval(std::atan2(y, x));
      double w = g.weights[qx] * g.weights[qy] * a *
                 std::pow(r2, -0.5 * (2.0 + 2.0 * s));
      out.mass += w;
      out.sxx += w * x * x;
      out.syy += w * y * y;
      out.sxy += w * x * y;
    }
  double area = half * half;
  out.mass *= area;
  out.sxx *= area;
  out.syy *= area;
  out.sxy *= area;
  return out;
}

// Near the singularity a single Gauss panel cannot track the kernel; split
// the cell into subcells and sum.
CellMoments cell_kernel_moments_refined(const Kernel& kernel, double cx,
                                        double cy, double half, int sub,
                                        int order) {
  CellMoments out;
  const double shalf = half / sub;
  for (int ix = 0; ix < sub; ++ix)
    for (int iy = 0; iy < sub; ++iy) {
      double sx = cx - half + (2 * ix + 1) * shalf;
      double sy = cy - half + (2 * iy + 1) * shalf;
      CellMoments m = cell_kernel_moments(kernel, sx, sy, shalf, order);
      out.mass += m.mass;
      out.sxx += m.sxx;
      out.syy += m.syy;
      out.sxy += m.sxy;
    }
  return out;
}

struct Coupling2d {
  int range = 0;
  std::vector<double> table;  // (2r+1)^2, index (dx+r) + (2r+1)(dy+r)
  double diag_coeff = 0.0;
  std::vector<double> taylor;  // 3x3 stencil, center entry = diagonal part
  double at(int dx, int dy) const {
    if (std::abs(dx) > range || std::abs(dy) > range) return 0.0;
    return table[(dx + range) + (2 * range + 1) * (dy + range)];
  }
  double& at_ref(int dx, int dy) {
    return table[(dx + range) + (2 * range + 1) * (dy + range)];
  }
};

Coupling2d build_coupling(const Kernel& kernel, const Grid& grid,
                          const AssembleOptions& opt) {
  const double h = grid.h;
  const double s = kernel.order;
  const int K = std::max(grid.nx, grid.ny);
  Coupling2d c;
  c.range = K;
  c.table.assign(static_cast<size_t>(2 * K + 1) * (2 * K + 1), 0.0);

  // Every off-center cell couples through its exact kernel mass against the
  // nodal value at its center.  The second-moment defect of each cell
  // (midpoint sampling vs the true in-cell variation) is accumulated and
  // folded into the Taylor stencil below, which makes the scheme exact on
  // quadratics up to the box tail.
  const int near = opt.near_cell_range;
  Eigen::Matrix2d sigma_comp = Eigen::Matrix2d::Zero();
  for (int ky = 0; ky <= K; ++ky) {
    for (int kx = -K; kx <= K; ++kx) {
      if (ky == 0 && kx <= 0) continue;  // half lattice; mirrored
      int ring = std::max(std::abs(kx), std::abs(ky));
      CellMoments m;
      if (ring == 1) {
        m = cell_kernel_moments_refined(kernel, kx * h, ky * h, 0.5 * h, 8, 4);
      } else if (ring <= near) {
        m = cell_kernel_moments_refined(kernel, kx * h, ky * h, 0.5 * h, 4, 4);
      } else if (ring <= 8) {
        m = cell_kernel_moments(kernel, kx * h, ky * h, 0.5 * h, 6);
      } else {
        m = cell_kernel_moments(kernel, kx * h, ky * h, 0.5 * h, 4);
      }
      c.at_ref(kx, ky) += m.mass;
      c.at_ref(-kx, -ky) += m.mass;
      // both cells of the +/- pair have the same moment defect
      sigma_comp(0, 0) += 2.0 * (m.sxx - kx * h * kx * h * m.mass);
      sigma_comp(1, 1) += 2.0 * (m.syy - ky * h * ky * h * m.mass);
      sigma_comp(0, 1) += 2.0 * (m.sxy - kx * h * ky * h * m.mass);
    }
  }
  sigma_comp(1, 0) = sigma_comp(0, 1);

  // Center cell: exact second moment of K against the 5/9-point FD Hessian.
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
  {
    auto rho = [&](double theta) {
      return 0.5 * h / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
    };
    std::vector<double> breaks;
    for (int q = 0; q < 4; ++q)
      breaks.push_back(std::numbers::pi * (0.25 + 0.5 * q));
    if (kernel.density.type == AngularDensity::Type::sampled) {
      size_t msamp = kernel.density.samples.size();
      for (size_t q = 0; q < msamp; ++q)
        breaks.push_back(2.0 * std::numbers::pi * q / msamp);
    }
    auto entry = [&](int a, int b) {
      auto f = [&](double theta) {
        double comp[2] = {std::cos(theta), std::sin(theta)};
        return comp[a] * comp[b] * kernel.density.eval(theta) *
               std::pow(rho(theta), 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
      };
      return circle_integrate(f, breaks);
    };
    sigma(0, 0) = entry(0, 0);
    sigma(1, 1) = entry(1, 1);
    sigma(0, 1) = sigma(1, 0) = entry(0, 1);
  }
  sigma += sigma_comp;
  if (sigma(0, 0) <= 0.0 || sigma(1, 1) <= 0.0)
    throw numerical_error("near-field moment matrix lost positivity");
  // Taylor stencil as a separate 3x3 pair table; it is applied only between
  // nodes whose cells sit safely inside the domain.
  const double h2 = h * h;
  c.taylor.assign(9, 0.0);
  auto tref = [&](int dx, int dy) -> double& {
    return c.taylor[(dx + 1) + 3 * (dy + 1)];
  };
  tref(1, 0) += 0.5 * sigma(0, 0) / h2;
  tref(-1, 0) += 0.5 * sigma(0, 0) / h2;
  tref(0, 1) += 0.5 * sigma(1, 1) / h2;
  tref(0, -1) += 0.5 * sigma(1, 1) / h2;
  tref(1, 1) += 0.25 * sigma(0, 1) / h2;
  tref(-1, -1) += 0.25 * sigma(0, 1) / h2;
  tref(1, -1) -= 0.25 * sigma(0, 1) / h2;
  tref(-1, 1) -= 0.25 * sigma(0, 1) / h2;
  double tdiag = 0.0;
  for (double v : c.taylor) tdiag += v;
  tref(0, 0) = tdiag;  // pair form: diagonal equals the stencil sum

  // Exterior of the covered box, exactly.
  const double L = (K + 0.5) * h;
  double t_out;
  {
    auto rho = [&](double theta) {
      return L / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
    };
    std::vector<double> breaks;
    for (int q = 0; q < 4; ++q)
      breaks.push_back(std::numbers::pi * (0.25 + 0.5 * q));
    auto f = [&](double theta) {
      return kernel.density.eval(theta) * std::pow(rho(theta), -2.0 * s) / (2.0 * s);
    };
    t_out = circle_integrate(f, breaks);
  }

  double csum = 0.0;
  for (double vls : c.table) csum += vls;
  c.diag_coeff = csum + t_out;
  return c;
}

// \int_cell d(z)^s K(z - x) dz over an absolute cell, zero extension of d.
double cell_profile_integral(const Kernel& kernel, const Domain& dom,
                             const Point& x, double cx, double cy, double half,
                             double s, int depth) {
  const Point c(cx, cy);
  const double din = dom.exact_distance(c);
  const double half_diag = half * std::numbers::sqrt2;
  auto kern = [&](const Point& z) {
    Point y = z - x;
    double r2 = y.squaredNorm();
    double a = kernel.density.eval(std::atan2(y[1], y[0]));
    return a * std::pow(r2, -0.5 * (2.0 + 2.0 * kernel.order));
  };
  if (din >= half_diag) {
    // smooth: tensor Gauss of d^s K
    const GaussRule& g = gauss_rule(3);
    double sum = 0.0;
    for (int qx = 0; qx < 3; ++qx)
      for (int qy = 0; qy < 3; ++qy) {
        Point z(cx + half * g.nodes[qx], cy + half * g.nodes[qy]);
        sum += g.weights[qx] * g.weights[qy] *
               std::pow(dom.distance(z), s) * kern(z);
      }
    return sum * half * half;
  }
  bool any_inside = false;
  for (int ix = -1; ix <= 1; ++ix)
    for (int iy = -1; iy <= 1; ++iy)
      any_inside |= dom.inside(Point(cx + ix * half, cy + iy * half));
  if (!any_inside && depth <= 2) return 0.0;
  if (depth == 0) {
    if (!dom.inside(c)) return 0.0;
    return 4.0 * half * half * std::pow(dom.distance(c), s) * kern(c);
  }
  double sum = 0.0;
  const double q = 0.5 * half;
  for (int ix = -1; ix <= 1; ix += 2)
    for (int iy = -1; iy <= 1; iy += 2)
      sum += cell_profile_integral(kernel, dom, x, cx + ix * q, cy + iy * q, q,
                                   s, depth - 1);
  return sum;
}

// (1/2) \int_cell0 (2 - (d(x+y)/d_i)^s - (d(x-y)/d_i)^s) K(y) dy for nodes
// whose own cell straddles the boundary.
double center_cell_profile(const Kernel& kernel, const Domain& dom,
                           const Point& x, double di, double half, double s) {
  const int m = 48;
  double total = 0.0;
  const double dis = std::pow(di, s);
  for (int q = 0; q < m; ++q) {
    double theta = 2.0 * std::numbers::pi * (q + 0.5) / m;
    Point dir(std::cos(theta), std::sin(theta));
    double rho = half / std::max(std::abs(dir[0]), std::abs(dir[1]));
    auto g = [&](double r) {
      double dp = dom.distance(x + r * dir);
      double dm = dom.distance(x - r * dir);
      double val = 2.0 - (std::pow(dp, s) + std::pow(dm, s)) / dis;
      return 0.5 * val * std::pow(r, -1.0 - 2.0 * kernel.order);
    };
    std::vector<double> kinks;
    for (double rk : dom.radial_kinks(x, dir, rho)) kinks.push_back(rk);
    for (double rk : dom.radial_kinks(x, -dir, rho)) kinks.push_back(rk);
    auto edges = geometric_panels(1e-4 * half, rho, 1.8, kinks);
    double ray = 0.0;
    for (size_t e = 0; e + 1 < edges.size(); ++e)
      ray += gauss_integrate(g, edges[e], edges[e + 1], 6);
    total += kernel.density.eval(theta) * ray;
  }
  return total * (2.0 * std::numbers::pi / m);
}

// d^s-profile diagonal correction near the boundary: replaces the lattice
// view of nearby cells (nodal value at the center, zero at missing lattice
// points) by the cell integrals of the model u = u_i (d/d_i)^s.
Vector boundary_profile_diag(const Kernel& kernel, const Grid& grid,
                             const Coupling2d& c,
                             const std::vector<unsigned char>& regular,
                             int window) {
  const Domain& dom = *grid.domain;
  const double h = grid.h, s = kernel.order;
  Vector D = Vector::Zero(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const Point& x = grid.nodes[i];
    double di = dom.distance(x);
    if (di >= 3.0 * h) continue;
    double dis = std::pow(di, s);
    int cxi = static_cast<int>(std::lround((x[0] - grid.cell0[0]) / h));
    int cyi = static_cast<int>(std::lround((x[1] - grid.cell0[1]) / h));
    double acc = 0.0;
    for (int ky = -window; ky <= window; ++ky)
      for (int kx = -window; kx <= window; ++kx) {
        if (kx == 0 && ky == 0) continue;
        double J = cell_profile_integral(kernel, dom, x, x[0] + kx * h,
                                         x[1] + ky * h, 0.5 * h, s, 5);
        int j = grid.node_at(cxi + kx, cyi + ky);
        double lattice_view = 0.0;
        if (j >= 0)
          lattice_view =
              c.at(kx, ky) * std::pow(dom.distance(grid.nodes[j]), s);
        acc += (lattice_view - J) / dis;
      }
    if (!regular[i])
      acc += center_cell_profile(kernel, dom, x, di, 0.5 * h, s);
    D[i] = acc;
  }
  return D;
}

}  // namespace

double OperatorMatrix::entry(Eigen::Index i, Eigen::Index j) const {
  if (dense) return form(i, j);
  const Grid& g = *grid;
  const double h2 = g.h * g.h;
  if (i == j)
    return h2 * (diag_coeff + boundary_diag[i] +
                 (regular[i] ? taylor[4] : 0.0));
  int dx = static_cast<int>(std::lround((g.nodes[j][0] - g.nodes[i][0]) / g.h));
  int dy = static_cast<int>(std::lround((g.nodes[j][1] - g.nodes[i][1]) / g.h));
  const int K = coupling_range;
  double cab = 0.0;
  if (std::abs(dx) <= K && std::abs(dy) <= K)
    cab = coupling[(dx + K) + (2 * K + 1) * (dy + K)];
  if (std::abs(dx) <= 1 && std::abs(dy) <= 1 && regular[i] && regular[j])
    cab += taylor[(dx + 1) + 3 * (dy + 1)];
  return -h2 * cab;
}

Vector OperatorMatrix::form_apply(const Vector& u) const {
  if (dense) return form * u;
  const Grid& g = *grid;
  const int K = coupling_range;
  const int stride = 2 * K + 1;
  const Eigen::Index n = u.size();
  const double h2 = g.h * g.h;
  static thread_local std::vector<int> cx, cy;
  cx.resize(n);
  cy.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cx[i] = static_cast<int>(std::lround((g.nodes[i][0] - g.cell0[0]) / g.h));
    cy[i] = static_cast<int>(std::lround((g.nodes[i][1] - g.cell0[1]) / g.h));
  }
  Vector out(n);
  const double* tab = coupling.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int xi = cx[i], yi = cy[i];
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      int dx = cx[j] - xi + K;
      int dy = cy[j] - yi + K;
      acc += tab[dx + stride * dy] * u[j];
    }
    double diag = (diag_coeff + boundary_diag[i]) * u[i];
    if (regular[i]) {
      diag += taylor[4] * u[i];
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int j = g.node_at(xi + dx, yi + dy);
          if (j >= 0 && regular[j])
            acc += taylor[(dx + 1) + 3 * (dy + 1)] * u[j];
        }
    }
    out[i] = h2 * (diag - acc);
  }
  return out;
}

Vector OperatorMatrix::apply(const Vector& u) const {
  return form_apply(u).cwiseQuotient(mass);
}

double OperatorMatrix::form_energy(const Vector& u) const {
  return u.dot(form_apply(u));
}

OperatorMatrix assemble(const Kernel& kernel, const Grid& grid,
                        const AssembleOptions& options) {
  require(kernel.dim == grid.dim, "kernel and grid dimensions must agree");
  const size_t n = grid.size();
  if (n > options.max_nodes)
    throw resource_error(
        "grid has " + std::to_string(n) + " nodes; dense-era assembly is capped at " +
        std::to_string(options.max_nodes) +
        " (reduce N or raise AssembleOptions::max_nodes)");

  OperatorMatrix op;
  op.grid = grid.domain ? std::make_shared<Grid>(grid) : nullptr;
  if (!op.grid) throw parameter_error("grid must carry its domain");
  op.kernel = kernel;
  op.mass = grid.mass;

  if (grid.dim == 1) {
    op.dense = true;
    op.form = assemble_1d_form(kernel, grid);
    double hmin = 1e300;
    for (size_t k = 1; k < grid.vertices.size(); ++k)
      hmin = std::min(hmin, grid.vertices[k] - grid.vertices[k - 1]);
    op.split_radius = 2.0 * hmin;
    op.cutoff = 4.0 * grid.domain->diameter();
    return op;
  }

  Coupling2d c = build_coupling(kernel, grid, options);
  op.coupling_range = c.range;
  op.coupling = std::move(c.table);
  op.diag_coeff = c.diag_coeff;
  op.taylor = std::move(c.taylor);
  op.split_radius = grid.h;
  op.cutoff = (op.coupling_range + 0.5) * grid.h;

  // A node is regular when its cell and the full Taylor stencil sit safely
  // inside the domain.
  op.regular.assign(n, 0);
  const Domain& dom = *grid.domain;
  for (size_t i = 0; i < n; ++i) {
    if (dom.exact_distance(grid.nodes[i]) < 1.25 * grid.h) continue;
    int cxi = static_cast<int>(std::lround((grid.nodes[i][0] - grid.cell0[0]) / grid.h));
    int cyi = static_cast<int>(std::lround((grid.nodes[i][1] - grid.cell0[1]) / grid.h));
    bool ok = true;
    for (int dy = -1; dy <= 1 && ok; ++dy)
      for (int dx = -1; dx <= 1 && ok; ++dx)
        ok = grid.node_at(cxi + dx, cyi + dy) >= 0;
    op.regular[i] = ok ? 1 : 0;
  }

  {
    Coupling2d view;
    view.range = op.coupling_range;
    view.table = op.coupling;  // copy for the helper's at()
    op.boundary_diag =
        boundary_profile_diag(kernel, grid, view, op.regular, options.boundary_window);
  }

  if (n <= options.dense_node_limit) {
    op.dense = false;  // entry() below reads the lattice data
    Matrix B(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i; j < n; ++j) {
        double val = op.entry(i, j);
        B(i, j) = val;
        B(j, i) = val;
      }
    op.form = std::move(B);
    op.dense = true;
  }
  return op;
}

}  // namespace fracpoh
