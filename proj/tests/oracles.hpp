#pragma once

// Independent oracles for the test suites.  Everything here is deliberately
// written against the raw definitions (adaptive Simpson on the symmetrized
// singular integral, Fourier-side quadrature) and never calls the library's
// quadrature engine, so agreement is a genuine cross-check.

#include <functional>

namespace oracles {

// Adaptive Simpson on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 30);

// (-Delta)^s applied to exp(-x^2) in 1-D at point x, via the Fourier symbol.
double fourier_gaussian_1d(double s, double x);

// (-Delta)^s applied to exp(-|x|^2) in 2-D at radius r, via the Fourier
// symbol and the Bessel J0 angular integral.
double fourier_gaussian_2d(double s, double r);

// (-Delta)^s u (x) for a 1-D function by brute-force adaptive quadrature of
// the symmetrized difference c_{1,s} * int_0^inf (2u(x)-u(x+t)-u(x-t)) t^{-1-2s} dt.
// `kinks` lists radii where the integrand loses smoothness.
double frac_lap_1d(const std::function<double(double)>& u, double s, double x,
                   double c1s, const std::vector<double>& kinks = {},
                   double cutoff = 60.0, double tol = 1e-10);

// Same for a radial 2-D evaluation along rays: full polar quadrature with an
// m-point angular trapezoid and adaptive radial integrals.
double frac_lap_2d(const std::function<double(double, double)>& u, double s,
                   double x0, double x1, double c2s, int angular = 64,
                   double cutoff = 40.0, double tol = 1e-8);

}  // namespace oracles
