#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace logan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Node indices follow the graph layout: 0 is the exposure, 1..d are the
// mediators and d+1 is the outcome. Entry (j, i) of a coefficient matrix is
// the direct effect of node i on node j.
using Node = int;

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Violated model invariants (cycles, forbidden edges, bad parameters).
struct ModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or unusable input data.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The augmented Lagrangian loop stopped before reaching the acyclicity
// tolerance. Carries the last iterate so callers can inspect it.
struct ConvergenceError : NumericalError {
  ConvergenceError(const std::string& what, double h, Matrix iterate)
      : NumericalError(what), last_h(h), last_iterate(std::move(iterate)) {}
  double last_h;
  Matrix last_iterate;
};

// Denominator of a decorrelated estimating equation collapsed to ~0.
struct DegenerateProjection : NumericalError {
  DegenerateProjection(const std::string& what, Node j1, Node j2)
      : NumericalError(what), child(j1), parent(j2) {}
  Node child;
  Node parent;
};

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected square");
  }
}

}  // namespace logan
