#include "fracpoh/solve.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace fracpoh {

namespace {

Vector diagonal_of(const OperatorMatrix& op) {
  Vector d(op.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = op.entry(i, i);
  return d;
}

// Jacobi-preconditioned conjugate gradients on B x = b.
Vector cg_solve(const OperatorMatrix& op, const Vector& b, double tol,
                int max_iter, int* iterations) {
  const Vector dinv = diagonal_of(op).cwiseInverse();
  Vector x = Vector::Zero(b.size());
  Vector r = b;
  Vector z = dinv.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    if (iterations) *iterations = 0;
    return x;
  }
  for (int it = 0; it < max_iter; ++it) {
    Vector Bp = op.form_apply(p);
    double alpha = rz / p.dot(Bp);
    x += alpha * p;
    r -= alpha * Bp;
    if (r.norm() <= tol * bnorm) {
      if (iterations) *iterations = it + 1;
      return x;
    }
    z = dinv.cwiseProduct(r);
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw iteration_error("conjugate gradients did not converge", r.norm() / bnorm);
}

struct DenseFactor {
  Eigen::LDLT<Matrix> ldlt;
  double condition = 0.0;
  explicit DenseFactor(const Matrix& B) : ldlt(B) {
    if (ldlt.info() != Eigen::Success)
      throw numerical_error("operator factorization failed");
    Vector d = ldlt.vectorD();
    double dmin = d.minCoeff(), dmax = d.maxCoeff();
    if (dmin <= 0.0)
      throw numerical_error("operator matrix is not positive definite");
    condition = dmax / dmin;
    if (condition > 1e15)
      throw numerical_error("operator matrix is numerically singular (condition ~ " +
                            std::to_string(condition) + ")");
  }
};

}  // namespace

LinearSolveResult solve_linear(const OperatorMatrix& op, const Vector& g,
                               const SolveControls& controls) {
  require(static_cast<size_t>(g.size()) == op.size(), "rhs size mismatch");
  require(g.allFinite(), "rhs must be bounded on the grid");
  Vector b = op.mass.cwiseProduct(g);
  LinearSolveResult out;
  if (op.dense) {
    DenseFactor f(op.form);
    out.u = f.ldlt.solve(b);
    out.condition_estimate = f.condition;
  } else {
    out.u = cg_solve(op, b, std::max(controls.tolerance, 1e-12),
                     controls.max_iterations, &out.iterations);
  }
  double bnorm = b.norm();
  out.residual = bnorm > 0 ? (op.form_apply(out.u) - b).norm() / bnorm : 0.0;
  return out;
}

LinearSolveResult solve_linear(const OperatorMatrix& op, const ScalarField& g,
                               const SolveControls& controls) {
  const Grid& grid = *op.grid;
  Vector gv(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) gv[i] = g(grid.nodes[i]);
  return solve_linear(op, gv, controls);
}

double critical_exponent(int dim, double order) {
  if (dim <= 2.0 * order) return std::numeric_limits<double>::infinity();
  return (dim + 2.0 * order) / (dim - 2.0 * order);
}

PowerSolveResult solve_power(const OperatorMatrix& op, double p,
                             const SolveControls& controls) {
  require(p > 1.0, "power nonlinearity needs p > 1");
  const double pc = critical_exponent(op.kernel.dim, op.kernel.order);
  if (p >= pc)
    throw parameter_error(
        "supercritical or critical exponent p = " + std::to_string(p) +
        " refused: existence fails at and above the critical exponent (n+2s)/(n-2s) = " +
        std::to_string(pc));

  const Vector& w = op.mass;
  auto constraint = [&](const Vector& u) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
      c += w[i] * std::pow(std::abs(u[i]), p + 1.0);
    return c;
  };
  auto project = [&](Vector u) {
    double c = constraint(u);
    require(c > 0, "cannot project the zero function onto the constraint");
    return Vector(u / std::pow(c, 1.0 / (p + 1.0)));
  };

  // Positive initialization with the right boundary profile: the torsion
  // solution of the same operator.
  Vector u = project(solve_linear(op, Vector::Ones(op.size())).u);

  PowerSolveResult out;
  double q = u.dot(op.form_apply(u));
  out.objective_trace.push_back(q);
  double step = 1.0 / std::max(1e-12, q);
  bool converged = false;
  for (int it = 0; it < controls.max_iterations && !converged; ++it) {
    Vector grad = op.apply(u);  // W-gradient of 1/2 u^T B u
    // Projected gradient with backtracking; accepted steps never increase
    // the constrained objective.
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      Vector v = project(u - step * grad);
      double qv = v.dot(op.form_apply(v));
      if (qv <= q * (1.0 + 1e-14)) {
        double drop = q - qv;
        u = std::move(v);
        q = qv;
        out.objective_trace.push_back(q);
        accepted = true;
        converged = drop <= 1e-13 * std::abs(q);
        step *= 1.3;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) converged = true;  // no descent direction left at this scale
  }

  // Euler-Lagrange rescaling: M u = mu u^p with mu = u^T B u on the
  // constraint manifold, so U = mu^{1/(p-1)} u solves M U = U^p.
  double mu = u.dot(op.form_apply(u));
  Vector U = std::pow(mu, 1.0 / (p - 1.0)) * u;

  // Newton polish of F(U) = B U - W U^p (dense operators).
  if (op.dense) {
    for (int nit = 0; nit < 30; ++nit) {
      Vector Up(U.size()), Upm1(U.size());
      for (Eigen::Index i = 0; i < U.size(); ++i) {
        double a = std::abs(U[i]);
        Up[i] = std::pow(a, p - 1.0) * U[i];
        Upm1[i] = p * std::pow(a, p - 1.0);
      }
      Vector F = op.form_apply(U) - w.cwiseProduct(Up);
      double res = F.cwiseQuotient(w).lpNorm<Eigen::Infinity>();
      if (res < 1e-12 * std::max(1.0, U.lpNorm<Eigen::Infinity>())) break;
      Matrix J = op.form;
      J.diagonal() -= w.cwiseProduct(Upm1);
      Eigen::PartialPivLU<Matrix> lu(J);
      Vector delta = lu.solve(F);
      if (!delta.allFinite()) break;
      double dn = delta.lpNorm<Eigen::Infinity>();
      if (dn > 0.5 * std::max(1.0, U.lpNorm<Eigen::Infinity>())) delta *= 0.5 / dn;
      U -= delta;
    }
  }

  Vector Up(U.size());
  for (Eigen::Index i = 0; i < U.size(); ++i)
    Up[i] = std::pow(std::abs(U[i]), p - 1.0) * U[i];
  out.equation_residual = (op.apply(U) - Up).lpNorm<Eigen::Infinity>();
  if (!converged &&
      out.equation_residual > 1e-4 * std::max(1.0, U.lpNorm<Eigen::Infinity>()))
    throw iteration_error("power solver did not reach the residual target",
                          out.equation_residual);
  out.u = std::move(U);
  out.multiplier = mu;
  out.iterations = static_cast<int>(out.objective_trace.size()) - 1;
  return out;
}

EigenPair solve_eigen(const OperatorMatrix& op, int index,
                      const SolveControls& controls) {
  require(index >= 1, "eigenpair index starts at 1");
  const Vector& w = op.mass;
  auto w_normalize = [&](Vector& x) {
    double nrm = std::sqrt(x.dot(w.cwiseProduct(x)));
    x /= nrm;
  };

  std::vector<Vector> lower;  // W-orthonormal deflation basis
  std::unique_ptr<DenseFactor> factor;
  if (op.dense) factor = std::make_unique<DenseFactor>(op.form);
  EigenPair pair;
  for (int k = 1; k <= index; ++k) {
    Vector x = Vector::Ones(op.size());
    // Seed breaks symmetry for the higher modes.
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] += 0.3 * std::sin(static_cast<double>(k * (i + 1)));
    auto deflate = [&](Vector& v) {
      for (const Vector& phi : lower) v -= phi.dot(w.cwiseProduct(v)) * phi;
    };
    deflate(x);
    w_normalize(x);

    double lambda = 0.0;
    double res = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < controls.max_iterations; ++it) {
      Vector bx;
      if (op.dense) {
        bx = factor->ldlt.solve(w.cwiseProduct(x));
      } else {
        bx = cg_solve(op, w.cwiseProduct(x), 1e-12, 4000, nullptr);
      }
      deflate(bx);
      w_normalize(bx);
      x = std::move(bx);
      lambda = x.dot(op.form_apply(x));
      Vector r = op.apply(x) - lambda * x;
      res = r.norm();
      if (res <= std::max(controls.tolerance, 1e-9) * std::abs(lambda)) break;
    }
    if (res > std::max(controls.tolerance, 1e-9) * std::abs(lambda) * 10.0)
      throw iteration_error("inverse iteration did not converge", res);
    // Sign convention: the largest-magnitude entry is positive.
    Eigen::Index arg = 0;
    x.cwiseAbs().maxCoeff(&arg);
    if (x[arg] < 0) x = -x;
    pair.value = lambda;
    pair.function = x;
    pair.residual = res;
    lower.push_back(x);
  }
  return pair;
}

double energy(const OperatorMatrix& op, const Vector& u,
              const std::function<double(double)>& F) {
  double quad = 0.5 * u.dot(op.form_apply(u));
  double pot = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) pot += op.mass[i] * F(u[i]);
  return quad - pot;
}

}  // namespace fracpoh
