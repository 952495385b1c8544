#include "fracpoh/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracpoh {

namespace {

// Node spacing of the grid around a point.
double local_spacing(const Grid& g, const Point& x) {
  if (g.dim == 2) return g.h;
  const auto& v = g.vertices;
  auto it = std::upper_bound(v.begin(), v.end(), x[0]);
  size_t j = std::clamp<size_t>(static_cast<size_t>(it - v.begin()), 1, v.size() - 1);
  return v[j] - v[j - 1];
}

}  // namespace

TraceSample trace_quotient(const GridFunction& u, const Domain& domain,
                           double order, const Point& z, const Point& nu,
                           const TraceOptions& options) {
  const Grid& grid = *u.grid;
  TraceSample out;
  out.z = z;
  const double t0 = options.t0 > 0 ? options.t0 : 0.5 * domain.distance_cap();
  const double p =
      options.assumed_order > 0 ? options.assumed_order : std::min(order, 1.0 - order);

  for (int k = 0; k < options.levels; ++k) {
    double t = t0 * std::pow(0.5, k);
    Point x = z - t * nu;
    if (!domain.inside(x))
      throw parameter_error("trace ladder leaves the domain; shrink t0");
    if (t < options.min_spacings * local_spacing(grid, x)) continue;
    double d = domain.distance(x);
    out.ladder_t.push_back(t);
    out.ladder_q.push_back(u.eval(x) / std::pow(d, order));
  }
  if (out.ladder_t.size() < 3)
    throw parameter_error("trace ladder has fewer than 3 resolvable levels");

  // Least squares for q(t) = Q + c t^p.
  const size_t n = out.ladder_t.size();
  double s11 = static_cast<double>(n), s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (size_t k = 0; k < n; ++k) {
    double tp = std::pow(out.ladder_t[k], p);
    s12 += tp;
    s22 += tp * tp;
    b1 += out.ladder_q[k];
    b2 += tp * out.ladder_q[k];
  }
  double det = s11 * s22 - s12 * s12;
  double Q = (s22 * b1 - s12 * b2) / det;
  double c = (s11 * b2 - s12 * b1) / det;
  out.quotient = Q;
  double rss = 0.0;
  for (size_t k = 0; k < n; ++k) {
    double fit = Q + c * std::pow(out.ladder_t[k], p);
    rss += (out.ladder_q[k] - fit) * (out.ladder_q[k] - fit);
  }
  out.fit_residual = std::sqrt(rss / n);

  // Ladder values of a clean d^s profile drift monotonically in t.
  double qscale = 0.0;
  for (double q : out.ladder_q) qscale = std::max(qscale, std::abs(q));
  int updown = 0;
  for (size_t k = 2; k < n; ++k) {
    double d1 = out.ladder_q[k - 1] - out.ladder_q[k - 2];
    double d2 = out.ladder_q[k] - out.ladder_q[k - 1];
    if (d1 * d2 < -1e-6 * qscale * qscale) ++updown;
  }
  out.monotone_warning = updown > 0;
  return out;
}

RegularityFit regularity_probe(const GridFunction& u, const Domain& domain,
                               double order, const Point& z,
                               const RegularityOptions& options) {
  const Grid& grid = *u.grid;
  const double s = order;
  RegularityFit out;
  out.z = z;
  const double r0 = options.r0 > 0 ? options.r0 : 0.5 * domain.distance_cap();

  for (int k = 0; k < options.levels; ++k) {
    double r = r0 * std::pow(0.5, k);
    if (r < options.min_spacings * local_spacing(grid, z - 0.5 * r * Point(1, 0)))
      break;
    double num = 0.0, den = 0.0;
    std::vector<size_t> members;
    for (size_t i = 0; i < grid.size(); ++i) {
      if ((grid.nodes[i] - z).norm() > r) continue;
      members.push_back(i);
      double ds = std::pow(domain.distance(grid.nodes[i]), s);
      num += grid.weights[i] * u.values[i] * ds;
      den += grid.weights[i] * ds * ds;
    }
    if (members.empty() || den == 0.0) continue;
    double Q = num / den;
    double sup = 0.0;
    for (size_t i : members) {
      double ds = std::pow(domain.distance(grid.nodes[i]), s);
      sup = std::max(sup, std::abs(u.values[i] - Q * ds));
    }
    out.radii.push_back(r);
    out.projections.push_back(Q);
    out.sup_dev.push_back(sup);
  }
  if (out.radii.size() < 3)
    throw parameter_error("regularity probe has fewer than 3 usable radii");

  const double floor_val = 1e-13 * std::max(1.0, u.max_abs());
  bool all_zero = true;
  for (double d : out.sup_dev) all_zero &= d <= floor_val;
  if (all_zero) {
    out.exact = true;
    out.gamma_fit = std::numeric_limits<double>::infinity();
    out.r_squared = 1.0;
    out.theta.assign(out.radii.size(), 0.0);
    return out;
  }

  // log-log least squares: log sup = a + (s + gamma) log r.
  size_t n = out.radii.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t k = 0; k < n; ++k) {
    double x = std::log(out.radii[k]);
    double y = std::log(std::max(out.sup_dev[k], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.gamma_fit = slope - s;
  double corr = (n * sxy - sx * sy) /
                std::sqrt(std::max(1e-300, (n * sxx - sx * sx) * (n * syy - sy * sy)));
  out.r_squared = corr * corr;
  out.theta.resize(n);
  for (size_t k = 0; k < n; ++k)
    out.theta[k] = std::pow(out.radii[k], -slope) * out.sup_dev[k];
  return out;
}

double holder_seminorm_probe(const GridFunction& u, double exponent) {
  require(exponent > 0.0 && exponent <= 1.0, "Holder exponent must lie in (0,1]");
  const Grid& grid = *u.grid;
  std::vector<Point> pts;
  std::vector<double> vals;
  pts.reserve(grid.size() + 256);
  for (size_t i = 0; i < grid.size(); ++i) {
    pts.push_back(grid.nodes[i]);
    vals.push_back(u.values[i]);
  }
  // Boundary samples carry the exterior value zero.
  BoundaryQuadrature bq = boundary_nodes(*grid.domain, grid.dim == 1 ? 2 : 256);
  for (size_t j = 0; j < bq.size(); ++j) {
    pts.push_back(bq.nodes[j]);
    vals.push_back(0.0);
  }
  double best = 0.0;
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double dist = grid.dim == 1 ? std::abs(pts[i][0] - pts[j][0])
                                  : (pts[i] - pts[j]).norm();
      if (dist <= 0) continue;
      double q = std::abs(vals[i] - vals[j]) / std::pow(dist, exponent);
      best = std::max(best, q);
    }
  return best;
}

}  // namespace fracpoh
