#pragma once

#include "fracpoh/geometry.hpp"
#include "fracpoh/nonlocal_op.hpp"

#include <vector>

namespace fracpoh {

struct TraceOptions {
  double t0 = 0.0;          // ladder start; 0 -> distance_cap / 2
  int levels = 6;           // t_k = t0 2^{-k}
  double assumed_order = 0.0;  // correction exponent; 0 -> min(s, 1-s)
  double min_spacings = 4.0;   // drop ladder points below this many spacings
};

struct TraceSample {
  Point z;
  double quotient = 0.0;       // extrapolated limit of u/d^s
  std::vector<double> ladder_t;
  std::vector<double> ladder_q;
  double fit_residual = 0.0;   // rms misfit of the extrapolation model
  bool monotone_warning = false;
};

// Samples u at z - t nu for a geometric ladder of t, forms u/d^s and
// extrapolates t -> 0 against the model Q + c t^p.
TraceSample trace_quotient(const GridFunction& u, const Domain& domain,
                           double order, const Point& z, const Point& nu,
                           const TraceOptions& options = {});

struct RegularityOptions {
  double r0 = 0.0;   // largest ball radius; 0 -> distance_cap / 2
  int levels = 5;    // r_k = r0 2^{-k}
  double min_spacings = 4.0;
};

struct RegularityFit {
  Point z;
  std::vector<double> radii;
  std::vector<double> projections;  // Q(r)
  std::vector<double> sup_dev;      // sup_{B_r} |u - Q(r) d^s|
  std::vector<double> theta;        // r^{-s-gamma_fit} sup_dev
  double gamma_fit = 0.0;           // fitted exponent: sup ~ r^{s+gamma}
  double r_squared = 0.0;
  bool exact = false;               // sup at machine zero; gamma = +inf sentinel
};

// Projections Q(r) = (sum u d^s w)/(sum d^{2s} w) over B_r(z) and the decay
// exponent of sup |u - Q(r) d^s|; the fitted exponent is a lower-bound
// estimator (finite grids smooth the sup).
RegularityFit regularity_probe(const GridFunction& u, const Domain& domain,
                               double order, const Point& z,
                               const RegularityOptions& options = {});

// max over node pairs (boundary samples included with value zero) of
// |u(x) - u(y)| / |x - y|^exponent.
double holder_seminorm_probe(const GridFunction& u, double exponent);

}  // namespace fracpoh
