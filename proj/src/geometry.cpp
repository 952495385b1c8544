#include "fracpoh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracpoh {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Nearest-boundary distance for a point strictly inside an axis-aligned
// ellipse, by bisection on the outward-normal parameter.
double ellipse_interior_distance(double px, double py, double ax, double ay) {
  double x = std::abs(px), y = std::abs(py);
  // f(t) decreasing in t; root of (p - e(t)) x e'(t) = 0 in the first quadrant.
  auto f = [&](double t) {
    double ex = ax * std::cos(t), ey = ay * std::sin(t);
    return (x - ex) * (-ax * std::sin(t)) + (y - ey) * (ay * std::cos(t));
  };
  double lo = 0.0, hi = 0.5 * std::numbers::pi;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  double ex = ax * std::cos(t), ey = ay * std::sin(t);
  return std::hypot(x - ex, y - ey);
}
}  // namespace

Domain Domain::interval(double a, double b, double distance_cap) {
  require(b > a, "interval needs a_left < a_right");
  Domain d;
  d.shape_ = Shape::interval;
  d.dim_ = 1;
  d.p0_ = a;
  d.p1_ = b;
  d.cap_ = distance_cap > 0 ? distance_cap : 0.5 * d.inradius();
  return d;
}

Domain Domain::ball(const Point& center, double radius, double distance_cap) {
  require(radius > 0, "ball needs a positive radius");
  Domain d;
  d.shape_ = Shape::ball;
  d.dim_ = 2;
  d.center_ = center;
  d.p0_ = radius;
  d.cap_ = distance_cap > 0 ? distance_cap : 0.5 * radius;
  return d;
}

Domain Domain::ellipse(const Point& center, double ax, double ay,
                       double distance_cap) {
  require(ax > 0 && ay > 0, "ellipse needs positive semi-axes");
  Domain d;
  d.shape_ = Shape::ellipse;
  d.dim_ = 2;
  d.center_ = center;
  d.p0_ = ax;
  d.p1_ = ay;
  d.cap_ = distance_cap > 0 ? distance_cap : 0.5 * std::min(ax, ay);
  return d;
}

Domain Domain::annulus(double r_in, double r_out, double distance_cap) {
  require(r_out > r_in && r_in > 0, "annulus needs 0 < r_in < r_out");
  Domain d;
  d.shape_ = Shape::annulus;
  d.dim_ = 2;
  d.p0_ = r_in;
  d.p1_ = r_out;
  d.cap_ = distance_cap > 0 ? distance_cap : 0.5 * d.inradius();
  return d;
}

bool Domain::inside(const Point& x) const { return exact_distance(x) > 0.0; }

double Domain::exact_distance(const Point& x) const {
  switch (shape_) {
    case Shape::interval:
      return std::max(0.0, std::min(x[0] - p0_, p1_ - x[0]));
    case Shape::ball:
      return std::max(0.0, p0_ - (x - center_).norm());
    case Shape::annulus: {
      double r = (x - center_).norm();
      return std::max(0.0, std::min(r - p0_, p1_ - r));
    }
    case Shape::ellipse: {
      double qx = (x[0] - center_[0]) / p0_, qy = (x[1] - center_[1]) / p1_;
      if (qx * qx + qy * qy >= 1.0) return 0.0;
      return ellipse_interior_distance(x[0] - center_[0], x[1] - center_[1],
                                       p0_, p1_);
    }
  }
  return 0.0;
}

double Domain::cap_blend(double t) const {
  const double c = cap_, w = 0.5 * cap_;
  if (t <= c - w) return t;
  if (t >= c + w) return c;
  double u = t - (c - w);
  return t - u * u / (4.0 * w);
}

double Domain::distance(const Point& x) const {
  return cap_blend(exact_distance(x));
}

Point Domain::distance_gradient(const Point& x) const {
  const double step = 1e-6 * std::max(1.0, diameter());
  Point g = Point::Zero();
  for (int a = 0; a < dim_; ++a) {
    Point xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    g[a] = (distance(xp) - distance(xm)) / (2 * step);
  }
  return g;
}

double Domain::area() const {
  switch (shape_) {
    case Shape::interval: return p1_ - p0_;
    case Shape::ball: return std::numbers::pi * p0_ * p0_;
    case Shape::ellipse: return std::numbers::pi * p0_ * p1_;
    case Shape::annulus: return std::numbers::pi * (p1_ * p1_ - p0_ * p0_);
  }
  return 0.0;
}

double Domain::inradius() const {
  switch (shape_) {
    case Shape::interval: return 0.5 * (p1_ - p0_);
    case Shape::ball: return p0_;
    case Shape::ellipse: return std::min(p0_, p1_);
    case Shape::annulus: return 0.5 * (p1_ - p0_);
  }
  return 0.0;
}

double Domain::diameter() const {
  switch (shape_) {
    case Shape::interval: return p1_ - p0_;
    case Shape::ball: return 2 * p0_;
    case Shape::ellipse: return 2 * std::max(p0_, p1_);
    case Shape::annulus: return 2 * p1_;
  }
  return 0.0;
}

double Domain::perimeter() const {
  switch (shape_) {
    case Shape::interval: return 2.0;  // counting measure on two endpoints
    case Shape::ball: return kTwoPi * p0_;
    case Shape::annulus: return kTwoPi * (p0_ + p1_);
    case Shape::ellipse: {
      double sum = 0.0;
      const int m = 4096;
      for (int i = 0; i < m; ++i) {
        double t = kTwoPi * (i + 0.5) / m;
        sum += std::hypot(p0_ * std::sin(t), p1_ * std::cos(t));
      }
      return sum * kTwoPi / m;
    }
  }
  return 0.0;
}

std::vector<double> Domain::radial_kinks(const Point& x, const Point& dir,
                                         double rmax) const {
  std::vector<double> out;
  auto push = [&](double r) {
    if (r > 1e-14 && r < rmax) out.push_back(r);
  };
  const double w = 0.5 * cap_;
  // Level sets of the exact distance where d or its derivatives kink:
  // the boundary itself and the two edges of the cap blend zone.
  const double levels[3] = {0.0, cap_ - w, cap_ + w};
  switch (shape_) {
    case Shape::interval: {
      for (double lv : levels) {
        for (double p : {p0_ + lv, p1_ - lv}) {
          if (std::abs(dir[0]) > 1e-15) push((p - x[0]) / dir[0]);
        }
      }
      break;
    }
    case Shape::ball:
    case Shape::annulus: {
      std::vector<double> radii;
      if (shape_ == Shape::ball) {
        for (double lv : levels) radii.push_back(p0_ - lv);
      } else {
        for (double lv : levels) {
          radii.push_back(p0_ + lv);
          radii.push_back(p1_ - lv);
        }
      }
      Point delta = x - center_;
      double beta = delta.dot(dir), d2 = delta.squaredNorm();
      for (double rho : radii) {
        if (rho <= 0) continue;
        double disc = beta * beta + rho * rho - d2;
        if (disc < 0) continue;
        double sq = std::sqrt(disc);
        push(-beta + sq);
        push(-beta - sq);
      }
      break;
    }
    case Shape::ellipse: {
      // Sampled sign changes of the boundary level function along the ray.
      auto level = [&](double r) {
        Point p = x + r * dir;
        double qx = (p[0] - center_[0]) / p0_, qy = (p[1] - center_[1]) / p1_;
        return qx * qx + qy * qy - 1.0;
      };
      const int m = 256;
      double prev = level(0.0);
      for (int i = 1; i <= m; ++i) {
        double r = rmax * i / m;
        double cur = level(r);
        if (prev * cur < 0) {
          double lo = rmax * (i - 1) / m, hi = r;
          for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (level(lo) * level(mid) <= 0 ? hi : lo) = mid;
          }
          push(0.5 * (lo + hi));
        }
        prev = cur;
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BoundaryQuadrature boundary_nodes(const Domain& domain, int m) {
  require(m >= 2, "boundary_nodes needs m >= 2");
  BoundaryQuadrature q;
  switch (domain.shape()) {
    case Domain::Shape::interval: {
      q.nodes = {Point(domain.param0(), 0.0), Point(domain.param1(), 0.0)};
      q.normals = {Point(-1.0, 0.0), Point(1.0, 0.0)};
      q.weights = {1.0, 1.0};
      break;
    }
    case Domain::Shape::ball: {
      const double r = domain.param0();
      for (int j = 0; j < m; ++j) {
        double t = kTwoPi * j / m;
        Point nu(std::cos(t), std::sin(t));
        q.nodes.push_back(domain.center() + r * nu);
        q.normals.push_back(nu);
        q.weights.push_back(kTwoPi * r / m);
      }
      break;
    }
    case Domain::Shape::annulus: {
      const double ri = domain.param0(), ro = domain.param1();
      int mo = std::max(2, static_cast<int>(std::lround(m * ro / (ri + ro))));
      int mi = std::max(2, m - mo);
      for (int j = 0; j < mo; ++j) {
        double t = kTwoPi * j / mo;
        Point nu(std::cos(t), std::sin(t));
        q.nodes.push_back(domain.center() + ro * nu);
        q.normals.push_back(nu);
        q.weights.push_back(kTwoPi * ro / mo);
      }
      for (int j = 0; j < mi; ++j) {
        double t = kTwoPi * j / mi;
        Point rad(std::cos(t), std::sin(t));
        q.nodes.push_back(domain.center() + ri * rad);
        q.normals.push_back(-rad);  // outward of the domain points into the hole
        q.weights.push_back(kTwoPi * ri / mi);
      }
      break;
    }
    case Domain::Shape::ellipse: {
      const double ax = domain.param0(), ay = domain.param1();
      // Uniform-in-arclength nodes from a cumulative arclength table.
      const int fine = 1 << 14;
      std::vector<double> cum(fine + 1, 0.0);
      auto speed = [&](double t) {
        return std::hypot(ax * std::sin(t), ay * std::cos(t));
      };
      for (int i = 0; i < fine; ++i) {
        double t0 = kTwoPi * i / fine, t1 = kTwoPi * (i + 1) / fine;
        cum[i + 1] = cum[i] + 0.5 * (speed(t0) + speed(t1)) * (t1 - t0);
      }
      const double total = cum[fine];
      for (int j = 0; j < m; ++j) {
        double target = total * j / m;
        auto it = std::lower_bound(cum.begin(), cum.end(), target);
        size_t k = std::min<size_t>(fine - 1, it - cum.begin());
        if (k > 0) --k;
        double frac = (target - cum[k]) / std::max(1e-300, cum[k + 1] - cum[k]);
        double t = kTwoPi * (k + frac) / fine;
        Point z(domain.center()[0] + ax * std::cos(t),
                domain.center()[1] + ay * std::sin(t));
        Point nu(std::cos(t) / ax, std::sin(t) / ay);
        nu.normalize();
        q.nodes.push_back(z);
        q.normals.push_back(nu);
        q.weights.push_back(total / m);
      }
      break;
    }
  }
  return q;
}

double star_shape_margin(const Domain& domain, const Point& origin, int samples) {
  require(domain.inside(origin), "star-shape origin must lie strictly inside");
  BoundaryQuadrature q =
      boundary_nodes(domain, domain.dim() == 1 ? 2 : samples);
  double margin = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < q.size(); ++j)
    margin = std::min(margin, (q.nodes[j] - origin).dot(q.normals[j]));
  return margin;
}

namespace {

double graded_map(double xi, double beta) {
  if (xi <= 0.5) return 0.5 * std::pow(2.0 * xi, beta);
  return 1.0 - 0.5 * std::pow(2.0 * (1.0 - xi), beta);
}

// Area of an axis-aligned square cap Omega by recursive subdivision.
double cell_area_inside(const Domain& dom, double cx, double cy, double half,
                        int depth) {
  const Point c(cx, cy);
  const double d_in = dom.exact_distance(c);
  const double half_diag = half * std::numbers::sqrt2;
  if (d_in >= half_diag) return 4.0 * half * half;
  // Sample corners, edge midpoints, center.
  int in = 0, total = 0;
  for (int ix = -1; ix <= 1; ++ix)
    for (int iy = -1; iy <= 1; ++iy) {
      ++total;
      if (dom.inside(Point(cx + ix * half, cy + iy * half))) ++in;
    }
  if (depth == 0) return 4.0 * half * half * in / total;
  if (in == 0) {
    // Convex slivers through an edge are caught by deeper sampling.
    if (depth <= 4) return 0.0;
  }
  double sum = 0.0;
  const double q = 0.5 * half;
  for (int ix = -1; ix <= 1; ix += 2)
    for (int iy = -1; iy <= 1; iy += 2)
      sum += cell_area_inside(dom, cx + ix * q, cy + iy * q, q, depth - 1);
  return sum;
}

}  // namespace

Grid build_grid(const Domain& domain, int resolution, double grading) {
  require(resolution >= 8, "grid resolution must be at least 8");
  require(grading >= 1.0, "grading exponent must be >= 1");
  Grid g;
  g.dim = domain.dim();
  g.resolution = resolution;
  g.grading = grading;
  g.domain = std::make_shared<Domain>(domain);

  if (domain.dim() == 1) {
    const double a = domain.param0(), b = domain.param1();
    const int N = resolution;
    const int m = N + 1;  // segments
    g.vertices.resize(N + 2);
    for (int j = 0; j <= m; ++j)
      g.vertices[j] = a + (b - a) * graded_map(static_cast<double>(j) / m, grading);
    g.vertices.front() = a;
    g.vertices.back() = b;
    g.nodes.resize(N);
    g.weights.resize(N);
    g.mass.resize(N);
    for (int i = 1; i <= N; ++i) {
      g.nodes[i - 1] = Point(g.vertices[i], 0.0);
      g.mass[i - 1] = 0.5 * (g.vertices[i + 1] - g.vertices[i - 1]);
    }
    // Covering cells: midpoints between nodes, extended to the boundary.
    std::vector<double> edges(N + 1);
    edges[0] = a;
    edges[N] = b;
    for (int i = 1; i < N; ++i) edges[i] = 0.5 * (g.vertices[i] + g.vertices[i + 1]);
    for (int i = 0; i < N; ++i) g.weights[i] = edges[i + 1] - edges[i];
    return g;
  }

  require(grading == 1.0,
          "2-D grids use a uniform lattice; grading is supported in 1-D only");
  // Square cells on the bounding box, centers strictly inside.
  double xmin, xmax, ymin, ymax;
  switch (domain.shape()) {
    case Domain::Shape::ball:
      xmin = domain.center()[0] - domain.param0();
      xmax = domain.center()[0] + domain.param0();
      ymin = domain.center()[1] - domain.param0();
      ymax = domain.center()[1] + domain.param0();
      break;
    case Domain::Shape::ellipse:
      xmin = domain.center()[0] - domain.param0();
      xmax = domain.center()[0] + domain.param0();
      ymin = domain.center()[1] - domain.param1();
      ymax = domain.center()[1] + domain.param1();
      break;
    case Domain::Shape::annulus:
      xmin = domain.center()[0] - domain.param1();
      xmax = domain.center()[0] + domain.param1();
      ymin = domain.center()[1] - domain.param1();
      ymax = domain.center()[1] + domain.param1();
      break;
    default:
      throw parameter_error("unsupported 2-D shape for build_grid");
  }
  const int N = resolution;
  g.h = (xmax - xmin) / N;
  g.nx = N;
  g.ny = static_cast<int>(std::lround((ymax - ymin) / g.h));
  if (g.ny < 1) g.ny = 1;
  const double ycenter = 0.5 * (ymin + ymax);
  g.cell0 = Point(xmin + 0.5 * g.h, ycenter - 0.5 * g.h * (g.ny - 1));
  g.node_of_cell.assign(static_cast<size_t>(g.nx) * g.ny, -1);

  // Nodes sit at cell centers strictly inside, excluding centers closer to
  // the boundary than 0.2 h (a collocation point essentially on the boundary
  // carries no stable equation).  The areas of skipped or center-outside
  // cells are reassigned to the nearest kept node so the weights still sum
  // to |Omega| exactly.
  std::vector<double> w;
  std::vector<std::pair<Point, double>> orphans;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      Point c = g.cell0 + Point(ix * g.h, iy * g.h);
      double area = cell_area_inside(domain, c[0], c[1], 0.5 * g.h, 7);
      if (area <= 0.0) continue;
      if (domain.exact_distance(c) < 0.2 * g.h) {
        orphans.emplace_back(c, area);
        continue;
      }
      g.node_of_cell[g.cell_index(ix, iy)] = static_cast<int>(g.nodes.size());
      g.nodes.push_back(c);
      w.push_back(area);
    }
  }
  for (const auto& [c, area] : orphans) {
    size_t best = 0;
    double bd = 1e300;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
      double d = (g.nodes[i] - c).squaredNorm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    if (!g.nodes.empty()) w[best] += area;
  }
  g.weights = Eigen::Map<Vector>(w.data(), static_cast<long>(w.size()));
  // Operator metric: one full cell per node.  Cut-cell areas stay in
  // `weights` for volume quadrature; the translation-invariant operator
  // needs the uniform metric to stay consistent at boundary nodes.
  g.mass = Vector::Constant(g.nodes.size(), g.h * g.h);
  return g;
}

double cell_distance_moment_ratio(const Grid& grid, int node, double gamma) {
  const Domain& dom = *grid.domain;
  const Point x = grid.nodes[node];
  const double d0 = dom.distance(x);
  if (grid.dim == 1) {
    // Cell edges as in build_grid.
    const int N = static_cast<int>(grid.size());
    double lo = node == 0 ? grid.vertices.front()
                          : 0.5 * (grid.vertices[node] + grid.vertices[node + 1]);
    double hi = node == N - 1
                    ? grid.vertices.back()
                    : 0.5 * (grid.vertices[node + 1] + grid.vertices[node + 2]);
    // Exact when the cell sits inside one linear piece of d.
    const double a = dom.param0(), b = dom.param1();
    double cap_edge = dom.distance_cap() * 0.5;
    auto linear_piece = [&](double side_a) {
      double dlo = side_a ? lo - a : b - hi;
      double dhi = side_a ? hi - a : b - lo;
      double integral = (std::pow(dhi, 1.0 + gamma) - std::pow(dlo, 1.0 + gamma)) /
                        (1.0 + gamma);
      return integral / ((hi - lo) * std::pow(d0, gamma));
    };
    if (hi - a <= cap_edge) return linear_piece(true);
    if (b - lo <= cap_edge) return linear_piece(false);
    // Interior cell: plain sampling is accurate enough.
    double sum = 0.0;
    const int k = 8;
    for (int i = 0; i < k; ++i) {
      double t = lo + (hi - lo) * (i + 0.5) / k;
      sum += std::pow(dom.distance(Point(t, 0.0)), gamma);
    }
    return sum / (k * std::pow(d0, gamma));
  }
  // 2-D: subsample the cut cell.
  const double half = 0.5 * grid.h;
  const int k = 8;
  double sum = 0.0;
  int count = 0;
  for (int ix = 0; ix < k; ++ix)
    for (int iy = 0; iy < k; ++iy) {
      Point p = x + Point((ix + 0.5) / k * 2 * half - half,
                          (iy + 0.5) / k * 2 * half - half);
      if (!dom.inside(p)) continue;
      sum += std::pow(dom.distance(p), gamma);
      ++count;
    }
  if (count == 0) return 1.0;
  return (sum / count) / std::pow(d0, gamma);
}

}  // namespace fracpoh
