#pragma once

#include "fracpoh/nonlocal_op.hpp"

#include <functional>

namespace fracpoh {

struct SolveControls {
  double tolerance = 1e-10;   // algebraic residual target
  int max_iterations = 2000;
};

struct LinearSolveResult {
  Vector u;
  double residual = 0.0;            // ||B u - b|| / ||b||
  int iterations = 0;               // 0 for direct factorization
  double condition_estimate = 0.0;  // dense path only
};

// Solve the Dirichlet problem Lu = g: B u = W g.  Direct factorization on
// dense operators, Jacobi-preconditioned CG on matrix-free ones.
LinearSolveResult solve_linear(const OperatorMatrix& op, const Vector& g,
                               const SolveControls& controls = {});
LinearSolveResult solve_linear(const OperatorMatrix& op, const ScalarField& g,
                               const SolveControls& controls = {});

// (n + 2s)/(n - 2s), or +infinity when n <= 2s.
double critical_exponent(int dim, double order);

struct PowerSolveResult {
  Vector u;                   // nonnegative, nontrivial; M u ~ u^p
  double equation_residual = 0.0;  // ||M u - u^p||_inf
  double multiplier = 0.0;    // Lagrange multiplier of the constrained problem
  int iterations = 0;
  std::vector<double> objective_trace;  // accepted-step objective values
};

// Ground state of Lu = u^p by minimizing u^T B u over the constraint
// sum_i W_i |u_i|^{p+1} = 1 (projected gradient with backtracking), followed
// by the Euler-Lagrange rescaling and a Newton polish of M u = u^p.
// Refuses supercritical exponents.
PowerSolveResult solve_power(const OperatorMatrix& op, double p,
                             const SolveControls& controls = {});

struct EigenPair {
  double value = 0.0;
  Vector function;        // unit discrete L2 norm, maximum entry positive
  double residual = 0.0;  // ||M phi - lambda phi||_2
};

// index-th smallest eigenpair of B phi = lambda W phi by shifted inverse
// iteration with deflation of the lower pairs.
EigenPair solve_eigen(const OperatorMatrix& op, int index,
                      const SolveControls& controls = {});

// Discrete energy 1/2 <u, Mu>_W - sum_i W_i F(u_i); its W-gradient is
// exactly Mu - f(u).
double energy(const OperatorMatrix& op, const Vector& u,
              const std::function<double(double)>& F);

}  // namespace fracpoh
