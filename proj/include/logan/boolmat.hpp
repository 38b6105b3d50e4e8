#pragma once

/**
 * @file boolmat.hpp
 * @brief Max-min ("Boolean") matrix algebra over nonnegative matrices.
 *
 * In this algebra
 *   a (x) b  has entries  max_k min(a(i,k), b(k,j))
 *   a (+) b  has entries  max(a(i,j), b(i,j))
 *
 * On {0,1} matrices the two operators reduce to Boolean AND/OR products.
 * For the absolute coefficient matrix |W| of a DAG, entry (q2, q1) of
 *   W* = |W| (+) |W|^(2) (+) ... (+) |W|^(d)
 * is the largest, over all directed paths q1 -> q2, of the smallest |edge|
 * on the path. It is zero exactly when q1 is not an ancestor of q2.
 *
 * Only comparisons are performed, so every entry of every result is one of
 * the input entries (or zero) and equality tests against a reference are
 * exact.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "logan/types.hpp"

namespace logan {

/// Max-min product. Rectangular operands are accepted: a is p x q, b is q x r.
inline Matrix bool_mult(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("bool_mult: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + ")");
  }
  Matrix out = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    auto col = out.col(j);
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj <= 0.0) continue;  // min(., 0) contributes nothing over nonnegatives
      col = col.cwiseMax(a.col(k).cwiseMin(bkj));
    }
  }
  return out;
}

inline Matrix bool_add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("bool_add: operand shapes differ");
  }
  return a.cwiseMax(b);
}

/**
 * Star (path-closure) matrix  w (+) w^(2) (+) ... (+) w^(terms).
 *
 * The caller passes |W| (or a {0,1} support matrix). `terms` defaults to
 * dim - 2, the number of mediators. The partial sums obey
 *   R_{k+1} = w (+) (R_k (x) w),
 * so the loop stops as soon as one step leaves R unchanged.
 */
inline Matrix bool_star(const Matrix& w, std::optional<int> terms = std::nullopt) {
  require_square(w, "bool_star");
  if ((w.array() < 0.0).any()) {
    throw ShapeError("bool_star: entries must be nonnegative (pass |W|)");
  }
  const int k_max = std::max(1, terms.value_or(static_cast<int>(w.rows()) - 2));
  Matrix acc = w;
  for (int k = 2; k <= k_max; ++k) {
    Matrix next = bool_add(w, bool_mult(acc, w));
    if (next == acc) break;
    acc = std::move(next);
  }
  return acc;
}

/// {0,1} matrix with a one wherever |w(i,j)| > c (strict).
inline Matrix threshold_binary(const Matrix& w, double c) {
  if (c < 0.0 || std::isnan(c)) throw std::invalid_argument("threshold_binary: c must be >= 0");
  return (w.array().abs() > c).cast<double>().matrix();
}

/// Nodes i with bstar(j, i) != 0, in increasing order.
inline std::vector<Node> ancestors(const Matrix& bstar, Node j) {
  require_square(bstar, "ancestors");
  if (j < 0 || j >= bstar.rows()) {
    throw std::out_of_range("ancestors: node " + std::to_string(j) + " out of range");
  }
  std::vector<Node> out;
  for (Eigen::Index i = 0; i < bstar.cols(); ++i) {
    if (bstar(j, i) != 0.0) out.push_back(static_cast<Node>(i));
  }
  return out;
}

/// Result of exhaustive path enumeration between two nodes.
struct PathSummary {
  bool exists = false;
  double max_min_weight = 0.0;        // max over paths of min |edge|
  std::vector<double> total_effects;  // product of signed weights, one per path
  std::vector<std::vector<Node>> paths;
};

/**
 * Brute-force enumeration of every simple directed path q1 -> q2 in the graph
 * of w (edge i -> j iff w(j, i) != 0). Exponential in the dimension, so it
 * refuses inputs above `max_dim` nodes. Intended as a reference oracle.
 */
inline PathSummary path_oracle(const Matrix& w, Node q1, Node q2, int max_dim = 12) {
  require_square(w, "path_oracle");
  const int dim = static_cast<int>(w.rows());
  if (dim > max_dim) {
    throw std::invalid_argument("path_oracle: dimension " + std::to_string(dim) +
                                " exceeds enumeration guard " + std::to_string(max_dim));
  }
  if (q1 < 0 || q1 >= dim || q2 < 0 || q2 >= dim) {
    throw std::out_of_range("path_oracle: node out of range");
  }
  PathSummary out;
  if (q1 == q2) return out;

  std::vector<char> on_path(dim, 0);
  std::vector<Node> path{q1};
  on_path[q1] = 1;

  auto visit = [&](auto&& self, Node at, double weakest, double product) -> void {
    for (Node next = 0; next < dim; ++next) {
      const double edge = w(next, at);
      if (edge == 0.0 || on_path[next]) continue;
      const double weak = std::min(weakest, std::abs(edge));
      const double prod = product * edge;
      path.push_back(next);
      if (next == q2) {
        out.exists = true;
        out.max_min_weight = std::max(out.max_min_weight, weak);
        out.total_effects.push_back(prod);
        out.paths.push_back(path);
      } else {
        on_path[next] = 1;
        self(self, next, weak, prod);
        on_path[next] = 0;
      }
      path.pop_back();
    }
  };
  visit(visit, q1, std::numeric_limits<double>::infinity(), 1.0);
  return out;
}

/// True when the support of w contains no directed cycle (self-loops included).
inline bool is_acyclic(const Matrix& w) {
  const Matrix support = threshold_binary(w, 0.0);
  const Matrix closure = bool_star(support, static_cast<int>(w.rows()));
  return closure.diagonal().isZero(0.0);
}

}  // namespace logan
