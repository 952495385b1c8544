#include <doctest.h>

#include "fracpoh/kernel.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace fracpoh;

TEST_CASE("frac_constant: 1-D closed form matches the Fourier oracle") {
  // c_{1,1/2} = 1/pi.
  CHECK(frac_constant(1, 0.5) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));

  // c_{n,s} must make the symmetrized singular integral of the Gaussian agree
  // with the Fourier-side value at x = 0.
  for (double s : {0.25, 0.5, 0.75}) {
    double c = frac_constant(1, s);
    auto gauss = [](double t) { return std::exp(-t * t); };
    double direct = oracles::frac_lap_1d(gauss, s, 0.0, c);
    double fourier = oracles::fourier_gaussian_1d(s, 0.0);
    CHECK(direct == doctest::Approx(fourier).epsilon(1e-6));
  }
}

TEST_CASE("frac_constant: positivity and parameter errors") {
  for (double s : {0.05, 0.3, 0.6, 0.95}) {
    CHECK(frac_constant(1, s) > 0.0);
    CHECK(std::isfinite(frac_constant(2, s)));
  }
  CHECK_THROWS_AS(frac_constant(1, 1.0), parameter_error);
  CHECK_THROWS_AS(frac_constant(1, 0.0), parameter_error);
  CHECK_THROWS_AS(frac_constant(3, 0.5), parameter_error);
}

TEST_CASE("frac_constant: 2-D value against the tensor Fourier oracle") {
  const double s = 0.75;
  double c = frac_constant(2, s);
  auto gauss = [](double x, double y) { return std::exp(-x * x - y * y); };
  double direct = oracles::frac_lap_2d(gauss, s, 0.0, 0.0, c);
  double fourier = oracles::fourier_gaussian_2d(s, 0.0);
  CHECK(direct == doctest::Approx(fourier).epsilon(1e-6));
}

TEST_CASE("torsion_constant: explicit 1-D value at s = 1/2") {
  // kappa_{1,1/2} = 1: the singular integral of (1-x^2)^{1/2}_+ at 0 is 1.
  CHECK(torsion_constant(1, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  const double s = 0.5, c = frac_constant(1, s);
  auto u1 = [s](double t) {
    double q = 1.0 - t * t;
    return q > 0 ? std::pow(q, s) : 0.0;
  };
  double at0 = oracles::frac_lap_1d(u1, s, 0.0, c, {1.0});
  CHECK(1.0 / at0 == doctest::Approx(torsion_constant(1, s)).epsilon(1e-6));
}

TEST_CASE("torsion_constant: the operator value is constant inside the ball") {
  const double s = 0.5, c = frac_constant(1, s);
  const double kappa = torsion_constant(1, s);
  auto u1 = [s, kappa](double t) {
    double q = 1.0 - t * t;
    return q > 0 ? kappa * std::pow(q, s) : 0.0;
  };
  for (double x : {0.0, 0.3}) {
    double val = oracles::frac_lap_1d(u1, s, x, c, {1.0 - x, 1.0 + x});
    CHECK(val == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("torsion_constant: 2-D constancy across probe points") {
  const double s = 0.75, c = frac_constant(2, s);
  const double kappa = torsion_constant(2, s);
  auto u1 = [s, kappa](double x, double y) {
    double q = 1.0 - x * x - y * y;
    return q > 0 ? kappa * std::pow(q, s) : 0.0;
  };
  double lo = 1e300, hi = -1e300;
  const double probes[5][2] = {{0, 0}, {0.3, 0}, {0, 0.45}, {-0.25, 0.2}, {0.1, -0.35}};
  for (auto& pr : probes) {
    double val = oracles::frac_lap_2d(u1, s, pr[0], pr[1], c, 128);
    lo = std::min(lo, val);
    hi = std::max(hi, val);
  }
  CHECK(hi - lo <= 1e-4 * hi);          // constancy
  CHECK(hi == doctest::Approx(1.0).epsilon(2e-3));  // and the constant is 1
}

TEST_CASE("anisotropy: fractional kernel is pinned to 1") {
  std::mt19937_64 rng(20240817);
  std::normal_distribution<double> normal;
  for (int dim : {1, 2}) {
    for (double s : {0.3, 0.5, 0.75}) {
      Kernel k = Kernel::fractional(dim, s);
      double worst = 0.0;
      for (int trial = 0; trial < 64; ++trial) {
        Point nu;
        if (dim == 1) {
          nu = Point(rng() % 2 ? 1.0 : -1.0, 0.0);
        } else {
          nu = Point(normal(rng), normal(rng));
          nu.normalize();
        }
        worst = std::max(worst, std::abs(anisotropy(k, nu) - 1.0));
      }
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("anisotropy: evenness, rotation invariance, homogeneity") {
  const double s = 0.6;
  Kernel k = Kernel::fractional(2, s);
  Point nu(std::cos(0.7), std::sin(0.7));
  CHECK(anisotropy(k, nu) == doctest::Approx(anisotropy(k, Point(-nu))).epsilon(1e-14));

  // Any rotation-invariant density gives direction-independent output.
  Kernel k2 = Kernel::make(2, s, AngularDensity::constant_density(3.7));
  Point nu2(std::cos(2.1), std::sin(2.1));
  CHECK(anisotropy(k2, nu) == doctest::Approx(anisotropy(k2, nu2)).epsilon(1e-12));

  // Scaling the density by m scales A by exactly m.
  const size_t m = 64;
  std::vector<double> tab(m), tab3(m);
  for (size_t j = 0; j < m; ++j) {
    double theta = 2.0 * std::numbers::pi * j / m;
    tab[j] = 1.0 + 0.5 * std::cos(2.0 * theta);
    tab3[j] = 3.0 * tab[j];
  }
  Kernel ka = Kernel::make(2, s, AngularDensity::sampled_density(tab, 2));
  Kernel kb = Kernel::make(2, s, AngularDensity::sampled_density(tab3, 2));
  CHECK(anisotropy(kb, nu) == doctest::Approx(3.0 * anisotropy(ka, nu)).epsilon(1e-10));
}

TEST_CASE("anisotropy: sampled density against brute-force angular quadrature") {
  const double s = 0.75;
  const double c = frac_constant(2, s);
  const size_t m = 1024;
  std::vector<double> tab(m);
  for (size_t j = 0; j < m; ++j) {
    double theta = 2.0 * std::numbers::pi * j / m;
    tab[j] = c * (1.0 + std::cos(theta) * std::cos(theta));
  }
  Kernel k = Kernel::make(2, s, AngularDensity::sampled_density(tab, 2));
  Point e1(1.0, 0.0);
  double got = anisotropy(k, e1);

  // Brute force on the same piecewise-linear density: adaptive Simpson per
  // sample segment, split additionally at the |cos|^{2s} cusps.
  auto a_interp = [&](double theta) { return k.density.eval(theta); };
  double brute = 0.0;
  const double half_pi = 0.5 * std::numbers::pi;
  for (size_t j = 0; j < m; ++j) {
    double lo = 2.0 * std::numbers::pi * j / m;
    double hi = 2.0 * std::numbers::pi * (j + 1) / m;
    auto f = [&](double theta) {
      return std::pow(std::abs(std::cos(theta)), 2.0 * s) * a_interp(theta);
    };
    for (double cusp : {half_pi, 3.0 * half_pi}) {
      if (cusp > lo && cusp < hi) {
        brute += oracles::integrate(f, lo, cusp, 1e-13);
        brute += oracles::integrate(f, cusp, hi, 1e-13);
        goto next_segment;
      }
    }
    brute += oracles::integrate(f, lo, hi, 1e-13);
  next_segment:;
  }
  brute *= k.constants.c_s_norm;
  CHECK(got == doctest::Approx(brute).epsilon(1e-8));
}

TEST_CASE("kernel invariants: homogeneity, evenness, ellipticity bounds") {
  const double s = 0.4;
  const size_t m = 32;
  std::vector<double> tab(m);
  for (size_t j = 0; j < m; ++j)
    tab[j] = 2.0 + std::sin(2.0 * (2.0 * std::numbers::pi * j / m));
  Kernel k = Kernel::make(2, s, AngularDensity::sampled_density(tab, 2));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 32; ++trial) {
    Point y(normal(rng), normal(rng));
    if (y.norm() < 1e-3) continue;
    // K(ty) = t^{-n-2s} K(y)
    double t = 0.25 + 3.0 * std::abs(normal(rng));
    CHECK(k.eval(t * y) ==
          doctest::Approx(std::pow(t, -2.0 - 2.0 * s) * k.eval(y)).epsilon(1e-12));
    // evenness through the symmetrized table
    CHECK(k.eval(-y) == doctest::Approx(k.eval(y)).epsilon(1e-12));
    // two-sided ellipticity bound at the sample
    double r = y.norm();
    double bound_lo = k.lambda * std::pow(r, -2.0 - 2.0 * s);
    double bound_hi = k.Lambda * std::pow(r, -2.0 - 2.0 * s);
    CHECK(k.eval(y) >= bound_lo * (1.0 - 1e-12));
    CHECK(k.eval(y) <= bound_hi * (1.0 + 1e-12));
  }

  CHECK(k.constants.c_frac > 0);
  CHECK(k.constants.kappa > 0);
  CHECK(k.constants.c_s_norm > 0);
  CHECK(k.constants.gamma_sq > 0);
}
