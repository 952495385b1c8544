#include "fracpoh/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace fracpoh {

namespace {

GaussRule build_gauss(int n) {
  // Newton iteration on Legendre polynomials, symmetric roots.
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss(n)).first;
  return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a,
                       double b, int n) {
  const GaussRule& r = gauss_rule(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += r.weights[i] * f(mid + half * r.nodes[i]);
  return half * sum;
}

double segmented_integrate(const std::function<double(double)>& f, double a,
                           double b, const std::vector<double>& breakpoints,
                           int n) {
  std::vector<double> edges{a, b};
  for (double t : breakpoints)
    if (t > a && t < b) edges.push_back(t);
  std::sort(edges.begin(), edges.end());
  double sum = 0.0;
  for (size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i + 1] > edges[i]) sum += gauss_integrate(f, edges[i], edges[i + 1], n);
  return sum;
}

double circle_integrate(const std::function<double(double)>& f,
                        std::vector<double> breaks,
                        std::vector<double> endpoint_singularities, int n) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto wrap = [&](double t) {
    t = std::fmod(t, two_pi);
    return t < 0 ? t + two_pi : t;
  };
  std::vector<double> edges;
  for (double t : breaks) edges.push_back(wrap(t));
  for (double t : endpoint_singularities) edges.push_back(wrap(t));
  if (edges.empty()) edges.push_back(0.0);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-14; }),
              edges.end());

  std::vector<double> sing;
  for (double t : endpoint_singularities) sing.push_back(wrap(t));
  auto is_singular = [&](double t) {
    for (double ssing : sing)
      if (std::abs(t - ssing) < 1e-12 || std::abs(std::abs(t - ssing) - two_pi) < 1e-12)
        return true;
    return false;
  };

  boost::math::quadrature::tanh_sinh<double> de(12);
  double sum = 0.0;
  const size_t m = edges.size();
  for (size_t i = 0; i < m; ++i) {
    double lo = edges[i];
    double hi = (i + 1 < m) ? edges[i + 1] : edges[0] + two_pi;
    if (hi - lo < 1e-14) continue;
    if (is_singular(lo) || is_singular(hi)) {
      sum += de.integrate(f, lo, hi);
    } else {
      sum += gauss_integrate(f, lo, hi, n);
    }
  }
  return sum;
}

std::vector<double> geometric_panels(double a, double b, double rho,
                                     const std::vector<double>& breakpoints) {
  std::vector<double> edges{a, b};
  for (double t : breakpoints)
    if (t > a * (1 + 1e-14) && t < b * (1 - 1e-14)) edges.push_back(t);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<double> out;
  out.push_back(edges.front());
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    // Geometric refinement within each piece keeps panel endpoint ratios
    // bounded even when lo is close to zero.
    double t = lo;
    while (t < hi) {
      double next = std::min(hi, std::max(t * rho, lo + (hi - lo) * 1e-12));
      if (next <= t) next = hi;
      out.push_back(next);
      t = next;
    }
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace fracpoh
