#pragma once

#include <functional>
#include <vector>

namespace fracpoh {

// Gauss-Legendre rule on [-1, 1]; nodes/weights computed once and cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_rule(int n);

// \int_a^b f(x) dx by an n-point Gauss-Legendre rule.
double gauss_integrate(const std::function<double(double)>& f, double a,
                       double b, int n = 16);

// Composite rule on [a, b] with breakpoints inserted and each piece further
// split when its endpoint ratio is too wide for a single Gauss panel.
double segmented_integrate(const std::function<double(double)>& f, double a,
                           double b, const std::vector<double>& breakpoints,
                           int n = 16);

// Periodic integral over [0, 2pi).  `breaks` are inserted as panel edges;
// panels touching a point listed in `endpoint_singularities` are integrated
// with a double-exponential rule so |.|^{2s}-type cusps do not degrade the
// Gauss panels.
double circle_integrate(const std::function<double(double)>& f,
                        std::vector<double> breaks,
                        std::vector<double> endpoint_singularities = {},
                        int n = 20);

// Geometric panel ladder a = r_0 < r_1 < ... < r_m = b with ratio <= rho,
// extra edges from `breakpoints` kept in place.
std::vector<double> geometric_panels(double a, double b, double rho,
                                     const std::vector<double>& breakpoints = {});

}  // namespace fracpoh
