#pragma once

/**
 * @file debias.hpp
 * @brief Cross-fitted decorrelated edge estimates.
 *
 * For half l the initial graph W~, its support B^ and the refit W- come from
 * the samples I_l. The nuisance regressions beta^, the decorrelated edges W^
 * and the variance contributions use the complement I_l^c.
 */

#include <algorithm>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logan/boolmat.hpp"
#include "logan/dagfit.hpp"
#include "logan/types.hpp"

namespace logan {

struct HalfFit {
  int half = 1;      // 1 or 2
  Matrix w_tilde;    // initial fit on I_l
  Matrix b_hat;      // support of w_tilde
  Matrix b_star;     // bool_star(b_hat)
  Matrix w_bar;      // refit on I_l, support within w_tilde's
  NotearsFit notears;

  int dim() const { return static_cast<int>(w_tilde.rows()); }
};

/// Row-wise penalized refit: X_j on the parents of j in w_tilde, rows 1..dim-1.
inline Matrix refit_rows(const Matrix& x, const Matrix& w_tilde, const PenaltySpec& spec) {
  const int dim = static_cast<int>(w_tilde.rows());
  if (x.cols() != dim) throw ShapeError("refit_rows: data and graph dimensions differ");
  const GramDesign g = make_gram(x);
  Matrix w_bar = Matrix::Zero(dim, dim);
  std::vector<int> parents;
  for (int j = 1; j < dim; ++j) {
    parents.clear();
    for (int i = 0; i < dim; ++i)
      if (i != j && w_tilde(j, i) != 0.0) parents.push_back(i);
    if (parents.empty()) continue;
    const Vector beta = fit_penalized_gram(g.gram, g.gram.col(j), g.gram(j, j), g.n, parents, spec).beta;
    w_bar.row(j) = beta.transpose();
  }
  return w_bar;
}

/// Steps 2-4b of the single-split procedure on the fitting half.
inline HalfFit fit_half(const Matrix& x_fit, int half, const NotearsSettings& notears, const PenaltySpec& refit) {
  HalfFit fit;
  fit.half = half;
  fit.notears = fit_notears(x_fit, notears);
  fit.w_tilde = fit.notears.w;
  fit.b_hat = threshold_binary(fit.w_tilde, 0.0);
  fit.b_star = bool_star(fit.b_hat, fit.dim());
  fit.w_bar = refit_rows(x_fit, fit.w_tilde, refit);
  return fit;
}

struct AncestorSet {
  std::vector<Node> nodes;
  bool warning = false;  // set for the exposure, which has no ancestors
};

/// Estimated ancestors of j, always with the exposure, and with every mediator for the outcome.
inline AncestorSet ancestors_with_conventions(const HalfFit& fit, Node j) {
  const int dim = fit.dim();
  if (j < 0 || j >= dim) throw std::out_of_range("ancestors_with_conventions: node out of range");
  AncestorSet out;
  if (j == 0) {
    out.warning = true;
    return out;
  }
  for (int i = 0; i < dim; ++i) {
    if (i == j) continue;
    if (i == 0 || j == dim - 1 || fit.b_star(j, i) != 0.0) out.nodes.push_back(i);
  }
  return out;
}

/// beta^(j1, j2): X_{j2} on ACT(j1) \ {j2}, from Gram statistics of I_l^c.
inline Vector fit_beta(const GramDesign& g, const HalfFit& fit, Node j1, Node j2, const PenaltySpec& spec) {
  if (fit.b_hat(j1, j2) == 0.0) throw std::invalid_argument("fit_beta: (j1, j2) is not an estimated edge");
  std::vector<int> support;
  for (Node k : ancestors_with_conventions(fit, j1).nodes)
    if (k != j2) support.push_back(k);
  return fit_penalized_gram(g.gram, g.gram.col(j2), g.gram(j2, j2), g.n, support, spec).beta;
}

struct EdgeProjection {
  Node j1 = 0;
  Node j2 = 0;
  Vector residual;      // x_{j2} - X beta over I_l^c
  double denominator = 0.0;
  double w_hat = 0.0;
  bool degenerate = false;
};

/**
 * Decorrelated estimate of W(j1, j2) on the complement samples x_eval:
 *   sum r_i (x_{i,j1} - sum_{j != j2} x_{i,j} Wbar(j1, j)) / sum x_{i,j2} r_i,
 * with r = x_{j2} - X beta. Throws DegenerateProjection when the denominator
 * is below 1e-10 n in absolute value.
 */
inline EdgeProjection decorrelated_edge(const Matrix& x_eval, const HalfFit& fit, Node j1, Node j2,
                                        const Vector& beta) {
  const double n = static_cast<double>(x_eval.rows());
  EdgeProjection e;
  e.j1 = j1;
  e.j2 = j2;
  e.residual = x_eval.col(j2) - x_eval * beta;
  e.denominator = x_eval.col(j2).dot(e.residual);
  if (!(std::abs(e.denominator) >= 1e-10 * n)) {
    throw DegenerateProjection("decorrelated_edge: near-zero denominator for edge (" + std::to_string(j1) + ", " +
                                   std::to_string(j2) + ")",
                               j1, j2);
  }
  Vector wrow = fit.w_bar.row(j1).transpose();
  wrow(j2) = 0.0;
  const Vector target = x_eval.col(j1) - x_eval * wrow;
  e.w_hat = e.residual.dot(target) / e.denominator;
  return e;
}

using Edge = std::pair<Node, Node>;  // (child i, parent j): entry (i, j)

/// Edges of b_hat lying on some directed path q1 -> q2.
inline std::vector<Edge> edge_set_S(const Matrix& b_hat, const Matrix& b_star, Node q1, Node q2) {
  std::vector<Edge> out;
  const int dim = static_cast<int>(b_hat.rows());
  for (int j = 0; j < dim; ++j) {
    if (j != q1 && b_star(j, q1) == 0.0) continue;
    for (int i = 0; i < dim; ++i) {
      if (b_hat(i, j) == 0.0) continue;
      if (i == q2 || b_star(q2, i) != 0.0) out.emplace_back(i, j);
    }
  }
  return out;
}

inline std::vector<Edge> edge_set_S(const HalfFit& fit, Node q1, Node q2) {
  return edge_set_S(fit.b_hat, fit.b_star, q1, q2);
}

/// All decorrelated edges of one half, evaluated on I_l^c.
struct DecorrelatedHalf {
  std::vector<EdgeProjection> edges;  // non-degenerate edges only
  std::vector<Edge> degenerate;
  Matrix w_hat;                       // dim x dim, zero off the computed edges
  Eigen::MatrixXi index;              // edge position in `edges`, -1 if absent
};

inline DecorrelatedHalf decorrelate_half(const Matrix& x_eval, const HalfFit& fit, std::span<const Edge> wanted,
                                         const PenaltySpec& spec) {
  const int dim = fit.dim();
  const GramDesign g = make_gram(x_eval);
  DecorrelatedHalf out;
  out.w_hat = Matrix::Zero(dim, dim);
  out.index = Eigen::MatrixXi::Constant(dim, dim, -1);
  for (const auto& [i, j] : wanted) {
    if (out.index(i, j) >= 0) continue;
    const Vector beta = fit_beta(g, fit, i, j, spec);
    try {
      out.edges.push_back(decorrelated_edge(x_eval, fit, i, j, beta));
    } catch (const DegenerateProjection&) {
      out.degenerate.emplace_back(i, j);
      continue;
    }
    out.index(i, j) = static_cast<int>(out.edges.size()) - 1;
    out.w_hat(i, j) = out.edges.back().w_hat;
  }
  return out;
}

struct VarianceEstimate {
  double value = 0.0;
  bool degenerate = false;
};

/**
 * Pooled cross-fitted residual mean square
 *   sum_l sum_{i in I_l^c} sum_j (x_ij - Wbar_l(j,.) x_i)^2 / (n (d+2)).
 * x_eval[l] holds the complement samples of half l.
 */
inline VarianceEstimate variance_estimate(std::span<const Matrix> x_eval, std::span<const Matrix> w_bar) {
  if (x_eval.size() != w_bar.size() || x_eval.empty()) throw ShapeError("variance_estimate: mismatched halves");
  double total = 0.0;
  double n = 0.0;
  const double dim = static_cast<double>(x_eval[0].cols());
  for (std::size_t l = 0; l < x_eval.size(); ++l) {
    const Matrix resid = x_eval[l] - x_eval[l] * w_bar[l].transpose();
    total += resid.squaredNorm();
    n += static_cast<double>(x_eval[l].rows());
  }
  VarianceEstimate v;
  v.value = total / (n * dim);
  v.degenerate = !(v.value > 0.0);
  return v;
}

}  // namespace logan
