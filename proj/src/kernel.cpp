#include "fracpoh/kernel.hpp"

#include "fracpoh/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracpoh {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_order_dim(int dim, double order) {
  require(dim == 1 || dim == 2, "kernel dimension n must be 1 or 2");
  require(order > 0.0 && order < 1.0, "kernel order s must lie strictly in (0,1)");
}
}  // namespace

AngularDensity AngularDensity::constant_density(double v) {
  require(v > 0.0, "constant angular density must be positive");
  AngularDensity d;
  d.type = Type::constant;
  d.value = v;
  return d;
}

AngularDensity AngularDensity::sampled_density(std::vector<double> samples, int dim) {
  AngularDensity d;
  d.type = Type::sampled;
  if (dim == 1) {
    require(samples.size() == 2, "1-D angular table holds exactly {a(+1), a(-1)}");
  } else {
    require(samples.size() >= 4 && samples.size() % 2 == 0,
            "2-D angular table needs an even number (>= 4) of uniform samples");
  }
  for (double v : samples)
    require(v >= 0.0 && std::isfinite(v), "angular density samples must be >= 0");
  // Symmetrize antipodal pairs so K(y) = K(-y) holds by construction.
  const size_t m = samples.size();
  if (dim == 1) {
    double mean = 0.5 * (samples[0] + samples[1]);
    samples[0] = samples[1] = mean;
  } else {
    for (size_t k = 0; k < m / 2; ++k) {
      double mean = 0.5 * (samples[k] + samples[k + m / 2]);
      samples[k] = samples[k + m / 2] = mean;
    }
  }
  require(*std::max_element(samples.begin(), samples.end()) > 0.0,
          "angular density must not vanish identically");
  d.samples = std::move(samples);
  return d;
}

double AngularDensity::eval(double theta) const {
  if (type == Type::constant) return value;
  const size_t m = samples.size();
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  double pos = t / kTwoPi * static_cast<double>(m);
  size_t k = static_cast<size_t>(pos);
  if (k >= m) k = m - 1;
  double frac = pos - static_cast<double>(k);
  return (1.0 - frac) * samples[k] + frac * samples[(k + 1) % m];
}

double AngularDensity::eval_1d(int sign) const {
  if (type == Type::constant) return value;
  return sign >= 0 ? samples[0] : samples[1];
}

double AngularDensity::min_value() const {
  if (type == Type::constant) return value;
  return *std::min_element(samples.begin(), samples.end());
}

double AngularDensity::max_value() const {
  if (type == Type::constant) return value;
  return *std::max_element(samples.begin(), samples.end());
}

double frac_constant(int dim, double order) {
  check_order_dim(dim, order);
  const double s = order;
  const double n = dim;
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) * s /
         (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - s));
}

double torsion_constant(int dim, double order) {
  check_order_dim(dim, order);
  const double s = order;
  const double n = dim;
  return std::tgamma(0.5 * n) /
         (std::pow(4.0, s) * std::tgamma(1.0 + s) * std::tgamma(0.5 * n + s));
}

double unit_angular_moment(int dim, double order) {
  check_order_dim(dim, order);
  if (dim == 1) return 2.0;  // |(+-1) . e|^{2s} = 1 at both points of S^0
  const double two_s = 2.0 * order;
  auto f = [two_s](double theta) {
    return std::pow(std::abs(std::cos(theta)), two_s);
  };
  const double half_pi = 0.5 * std::numbers::pi;
  return circle_integrate(f, {0.0, std::numbers::pi},
                          {half_pi, 3.0 * half_pi});
}

Kernel Kernel::make(int dim, double order, AngularDensity density) {
  check_order_dim(dim, order);
  Kernel k;
  k.dim = dim;
  k.order = order;
  k.density = std::move(density);
  k.lambda = k.density.min_value();
  k.Lambda = k.density.max_value();
  require(k.lambda > 0.0, "ellipticity requires a(theta) >= lambda > 0");
  k.constants.c_frac = frac_constant(dim, order);
  k.constants.kappa = torsion_constant(dim, order);
  k.constants.gamma_sq = std::pow(std::tgamma(1.0 + order), 2);
  // Pin c_s by A(nu) == 1 on the fractional kernel rather than a literature
  // formula; any consistent convention leaves the identity residuals alone.
  k.constants.c_s_norm =
      1.0 / (k.constants.c_frac * unit_angular_moment(dim, order));
  return k;
}

Kernel Kernel::fractional(int dim, double order) {
  return make(dim, order,
              AngularDensity::constant_density(frac_constant(dim, order)));
}

double Kernel::eval(const Point& y) const {
  const double r = dim == 1 ? std::abs(y[0]) : y.norm();
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  double a;
  if (dim == 1) {
    a = density.eval_1d(y[0] >= 0 ? 1 : -1);
  } else {
    a = density.eval(std::atan2(y[1], y[0]));
  }
  return a / std::pow(r, dim + 2.0 * order);
}

double Kernel::angular_at(const Point& direction) const {
  if (dim == 1) return density.eval_1d(direction[0] >= 0 ? 1 : -1);
  return density.eval(std::atan2(direction[1], direction[0]));
}

double Kernel::angular_mass() const {
  if (dim == 1) return density.eval_1d(1) + density.eval_1d(-1);
  if (density.type == AngularDensity::Type::constant)
    return kTwoPi * density.value;
  std::vector<double> knots;
  const size_t m = density.samples.size();
  for (size_t k = 0; k < m; ++k) knots.push_back(kTwoPi * k / m);
  auto f = [this](double theta) { return density.eval(theta); };
  return circle_integrate(f, knots);
}

Eigen::Matrix2d Kernel::angular_second_moment() const {
  Eigen::Matrix2d mom = Eigen::Matrix2d::Zero();
  if (dim == 1) {
    mom(0, 0) = density.eval_1d(1) + density.eval_1d(-1);
    return mom;
  }
  std::vector<double> knots{0.0};
  if (density.type == AngularDensity::Type::sampled) {
    const size_t m = density.samples.size();
    for (size_t k = 0; k < m; ++k) knots.push_back(kTwoPi * k / m);
  }
  auto entry = [&](int a, int b) {
    auto f = [&](double theta) {
      double c = std::cos(theta), s = std::sin(theta);
      double comp[2] = {c, s};
      return comp[a] * comp[b] * density.eval(theta);
    };
    return circle_integrate(f, knots);
  };
  mom(0, 0) = entry(0, 0);
  mom(1, 1) = entry(1, 1);
  mom(0, 1) = mom(1, 0) = entry(0, 1);
  return mom;
}

double anisotropy(const Kernel& kernel, const Point& nu) {
  const double len = kernel.dim == 1 ? std::abs(nu[0]) : nu.norm();
  require(std::abs(len - 1.0) < 1e-8, "anisotropy direction must be a unit vector");
  const double cs = kernel.constants.c_s_norm;
  if (kernel.dim == 1) {
    return cs * (kernel.density.eval_1d(1) + kernel.density.eval_1d(-1));
  }
  const double two_s = 2.0 * kernel.order;
  if (kernel.density.type == AngularDensity::Type::constant) {
    return cs * kernel.density.value * unit_angular_moment(kernel.dim, kernel.order);
  }
  const double phi = std::atan2(nu[1], nu[0]);
  std::vector<double> knots;
  const size_t m = kernel.density.samples.size();
  for (size_t k = 0; k < m; ++k) knots.push_back(kTwoPi * k / m);
  auto f = [&](double theta) {
    return std::pow(std::abs(std::cos(theta - phi)), two_s) *
           kernel.density.eval(theta);
  };
  const double half_pi = 0.5 * std::numbers::pi;
  return cs * circle_integrate(f, knots, {phi + half_pi, phi - half_pi});
}

}  // namespace fracpoh
