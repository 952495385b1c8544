#pragma once

#include "fracpoh/common.hpp"

#include <vector>

namespace fracpoh {

// Angular density a(theta) on S^{n-1}.  In 1-D the sphere S^0 = {-1, +1} and
// the table degenerates to the two values a(+1), a(-1); angular integrals are
// two-point sums.  In 2-D a sampled table lives on uniform angles with
// periodic linear interpolation in between.  Construction symmetrizes the
// table so a(theta) = a(theta + pi) holds exactly (kernel evenness).
struct AngularDensity {
  enum class Type { constant, sampled };
  Type type = Type::constant;
  double value = 1.0;                // constant case
  std::vector<double> samples;       // sampled case, uniform angles

  static AngularDensity constant_density(double v);
  // 2-D: samples at theta_k = 2 pi k / m.  1-D: exactly two values {a+, a-}.
  static AngularDensity sampled_density(std::vector<double> samples, int dim);

  double eval(double theta) const;   // 2-D periodic linear interpolation
  double eval_1d(int sign) const;    // a(+1) or a(-1)
  double min_value() const;
  double max_value() const;
};

// Normalization constants tied to a (dimension, order) pair.
//  c_frac   : constant making a(.) = c_frac the fractional Laplacian with
//             Fourier symbol |xi|^{2s}
//  kappa    : torsion constant, u = kappa (1-|x|^2)^s_+ solves Lu = 1 in B_1
//  c_s_norm : angular normalization pinned by A(nu) == 1 on the fractional
//             kernel
//  gamma_sq : Gamma(1+s)^2, the prefactor of the boundary terms
struct KernelConstants {
  double c_frac = 0.0;
  double kappa = 0.0;
  double c_s_norm = 0.0;
  double gamma_sq = 0.0;
};

struct Kernel {
  int dim = 1;                 // n in {1, 2}
  double order = 0.5;          // s in (0, 1)
  AngularDensity density;
  double lambda = 0.0;         // ellipticity bounds: lambda <= a <= Lambda
  double Lambda = 0.0;
  KernelConstants constants;

  // K(y) = a(y/|y|) / |y|^{n+2s}
  double eval(const Point& y) const;
  double angular_at(const Point& direction) const;

  // Two-point sum (1-D) or circle integral (2-D) of the density.
  double angular_mass() const;
  // \int_{S^{n-1}} theta theta^T a(theta) dtheta (scalar in 1-D -> [0][0]).
  Eigen::Matrix2d angular_second_moment() const;

  static Kernel fractional(int dim, double order);
  static Kernel make(int dim, double order, AngularDensity density);
};

// c_{n,s}: closed form validated against the Fourier-symbol oracle in tests.
double frac_constant(int dim, double order);

// kappa_{n,s}: closed form validated against singular-integral oracles.
double torsion_constant(int dim, double order);

// A(nu) = c_s \int_{S^{n-1}} |nu.theta|^{2s} a(theta) dtheta, with the stored
// normalization; identically 1 for the fractional kernel.
double anisotropy(const Kernel& kernel, const Point& nu);

// \int_{S^{n-1}} |e.theta|^{2s} dtheta for the unit density.
double unit_angular_moment(int dim, double order);

}  // namespace fracpoh
