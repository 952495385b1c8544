#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fracpoh {

// Points live in R^2; 1-D problems use the x component and keep y = 0.
using Point = Eigen::Vector2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Invalid user input: out-of-range parameters, malformed specs.
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation failed numerically (ill conditioning, no convergence).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solver ran out of its iteration budget.
struct iteration_error : numerical_error {
  double last_residual;
  iteration_error(const std::string& msg, double r)
      : numerical_error(msg), last_residual(r) {}
};

// Requested problem size exceeds the configured dense-assembly budget.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Corrupted or incompatible solution files.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw parameter_error(msg);
}

}  // namespace fracpoh
