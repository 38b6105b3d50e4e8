#pragma once

/**
 * @file dagfit.hpp
 * @brief DAG estimation and penalized regression.
 *
 * fit_notears solves
 *
 *   min_W  (1/n) sum_i ||x_i - W x_i||^2 + lambda ||W||_1
 *   s.t.   h(W) = trace(exp(W o W)) - dim = 0
 *
 * by an augmented Lagrangian: the smooth part
 *   f(W) + rho/2 h(W)^2 + alpha h(W)
 * plus the L1 term is minimized with OWL-QN (L-BFGS restricted to the
 * current orthant, Armijo backtracking). The outer loop raises rho tenfold
 * whenever h fails to drop below progress_ratio times its previous value,
 * then updates alpha += rho h.
 *
 * fit_penalized minimizes (1/n)||y - X b||^2 + sum p(|b_k|) with the LASSO or
 * MCP penalty, working from Gram statistics so that many regressions on the
 * same design share one X'X. Each lambda is solved by exact weighted-lasso
 * steps and finished with coordinate descent sweeps.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "logan/boolmat.hpp"
#include "logan/types.hpp"

namespace logan {

// ---------------------------------------------------------------------------
// Acyclicity

struct Acyclicity {
  double h = 0.0;
  Matrix grad;
  Matrix expm;  // exp(W o W)
};

/// h(W) = trace(exp(W o W)) - dim and its gradient exp(W o W)^T o 2W.
inline Acyclicity acyclicity(const Matrix& w) {
  require_square(w, "acyclicity");
  if (!w.allFinite()) throw NumericalError("acyclicity: W has non-finite entries");
  Acyclicity out;
  out.expm = w.cwiseProduct(w).exp();
  out.h = out.expm.trace() - static_cast<double>(w.rows());
  out.grad = out.expm.transpose().cwiseProduct(2.0 * w);
  return out;
}

// ---------------------------------------------------------------------------
// NOTEARS

struct InnerStep {
  int outer = 0;
  int inner = 0;
  double rho = 0.0;
  double objective = 0.0;  // augmented Lagrangian incl. the L1 term
};

struct NotearsSettings {
  double lambda = 0.1;
  double threshold_c0 = 1e-3;
  double rho_init = 1.0;
  double rho_max = 1e16;
  double alpha_init = 0.0;
  double h_tol = 1e-8;
  int max_outer = 100;
  int max_inner = 1000;
  double progress_ratio = 0.25;
  double inner_tol = 1e-6;   // sup-norm of the Newton step
  double inner_ftol = 1e-5;  // relative objective decrease per step
  std::function<void(const InnerStep&)> observer;
};

/// lambda = kappa * sqrt(log n / n)
inline double default_notears_lambda(int n, double kappa = 0.5) {
  if (n < 2) return kappa;
  return kappa * std::sqrt(std::log(static_cast<double>(n)) / n);
}

struct NotearsFit {
  Matrix w;                 // thresholded, acyclic estimate
  double h_raw = 0.0;       // h of the unthresholded iterate
  double rho = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  int removed_cycle_edges = 0;
};

namespace detail {

struct AugmentedValue {
  double smooth = 0.0;
  Acyclicity ac;
  Matrix grad;
};

class AugmentedLagrangian {
 public:
  explicit AugmentedLagrangian(Matrix cov) : cov_(std::move(cov)), trace_cov_(cov_.trace()) {}

  AugmentedValue evaluate(const Matrix& w, double rho, double alpha) const {
    const Matrix ws = w * cov_;
    const double loss = trace_cov_ - 2.0 * w.cwiseProduct(cov_).sum() + ws.cwiseProduct(w).sum();
    AugmentedValue v;
    v.ac = acyclicity(w);
    const double h = v.ac.h;
    v.smooth = loss + 0.5 * rho * h * h + alpha * h;
    v.grad = 2.0 * (ws - cov_) + (rho * h + alpha) * v.ac.grad;
    return v;
  }

 private:
  Matrix cov_;
  double trace_cov_;
};

/**
 * Exact minimizer of 0.5 v'Av + q'v + sum_k lambda_k |v_k| for positive
 * definite A (feature-sign search, started from v). Each step solves the
 * linear system on the current signed support and moves to the best point on
 * the segment, stopping at sign changes, so the objective decreases
 * monotonically.
 */
inline Vector l1_qp(const Matrix& a, const Vector& q, const Vector& lambda, Vector v) {
  const Eigen::Index n = q.size();
  auto objective = [&](const Vector& x) {
    return 0.5 * x.dot(a * x) + q.dot(x) + lambda.dot(x.cwiseAbs());
  };
  Vector theta = v.array().sign();
  const double tol = 1e-12 * std::max(1.0, lambda.maxCoeff() + q.cwiseAbs().maxCoeff());
  bool support_optimal = false;
  for (int iter = 0; iter < 20 * static_cast<int>(n) + 100; ++iter) {
    if (support_optimal) {
      const Vector grad = a * v + q;
      Eigen::Index pick = -1;
      double best = tol;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (theta(i) == 0.0 && std::abs(grad(i)) - lambda(i) > best) {
          best = std::abs(grad(i)) - lambda(i);
          pick = i;
        }
      }
      if (pick < 0) break;
      theta(pick) = grad(pick) > 0.0 ? -1.0 : 1.0;
    }
    std::vector<Eigen::Index> act;
    for (Eigen::Index i = 0; i < n; ++i)
      if (theta(i) != 0.0) act.push_back(i);
    const auto k = static_cast<Eigen::Index>(act.size());
    Matrix a_act(k, k);
    Vector rhs(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      rhs(r) = -(q(act[r]) + lambda(act[r]) * theta(act[r]));
      for (Eigen::Index c = 0; c < k; ++c) a_act(r, c) = a(act[r], act[c]);
    }
    const Vector sol = a_act.ldlt().solve(rhs);
    Vector target = Vector::Zero(n);
    for (Eigen::Index r = 0; r < k; ++r) target(act[r]) = sol(r);
    if (!target.allFinite()) break;

    // candidates: the full step and every sign change along the segment
    Vector best_v = target;
    double best_f = objective(target);
    bool crossed = false;
    for (Eigen::Index r = 0; r < k; ++r) {
      const Eigen::Index i = act[r];
      if (v(i) != 0.0 && target(i) * v(i) < 0.0) {
        const double t = v(i) / (v(i) - target(i));
        Vector x = v + t * (target - v);
        x(i) = 0.0;
        const double fx = objective(x);
        if (fx < best_f) {
          best_f = fx;
          best_v = std::move(x);
          crossed = true;
        }
      }
    }
    if (best_f > objective(v)) break;
    v = std::move(best_v);
    theta = v.array().sign();
    support_optimal = !crossed;
  }
  return v;
}

inline Vector l1_qp(const Matrix& a, const Vector& q, double lambda, Vector v) {
  return l1_qp(a, q, Vector::Constant(q.size(), lambda), std::move(v));
}

/**
 * Proximal Newton minimization of smooth(w) + lambda ||w||_1 over matrices with
 * zero diagonal. The quadratic model is the exact loss Hessian (2 cov on
 * every row), the Gauss-Newton term rho grad_h grad_h' and the diagonal of
 * (rho h + alpha) Hess(h), approximated by 2 exp(W o W)^T. Each row
 * subproblem is solved exactly, and the step is accepted with Armijo
 * backtracking, so the objective never increases. Returns the final iterate
 * and its h.
 */
template <class Eval, class Observer>
std::pair<Matrix, double> prox_newton(const Matrix& start, Eval&& eval, const Matrix& cov, double lambda, double rho,
                                      double alpha, const NotearsSettings& settings, Observer&& observe) {
  constexpr double kArmijo = 1e-4;
  constexpr int kRowPasses = 1;
  const Eigen::Index dim = cov.rows();
  const double ridge = 1e-10 * std::max(1.0, cov.diagonal().maxCoeff());
  Matrix w = start;
  w.diagonal().setZero();
  AugmentedValue cur = eval(w);
  double f = cur.smooth + lambda * w.cwiseAbs().sum();
  double damping = 0.0;

  std::vector<Eigen::Index> keep;
  for (int it = 0; it < settings.max_inner; ++it) {
    const Acyclicity& ac = cur.ac;
    const double weight = std::max(0.0, rho * ac.h + alpha);
    const Matrix e = ac.expm.transpose();

    // Rows interact only through the rank-one term rho (grad_h . d)^2; sweep
    // the rows Gauss-Seidel style with the other rows' contribution fixed.
    Matrix d = Matrix::Zero(dim, dim);
    double t = 0.0;  // <grad_h, d>
    for (int pass = 0; pass < kRowPasses; ++pass) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        keep.clear();
        for (Eigen::Index i = 0; i < dim; ++i)
          if (i != j) keep.push_back(i);
        const auto m = static_cast<Eigen::Index>(keep.size());
        Matrix a(m, m);
        Vector g(m), x0(m), gh(m), d0(m);
        for (Eigen::Index r = 0; r < m; ++r) {
          const Eigen::Index i = keep[r];
          for (Eigen::Index c = 0; c < m; ++c) a(r, c) = 2.0 * cov(i, keep[c]);
          a(r, r) += 2.0 * weight * e(j, i) + damping + ridge;
          g(r) = cur.grad(j, i);
          x0(r) = w(j, i);
          gh(r) = ac.grad(j, i);
          d0(r) = d(j, i);
        }
        a.noalias() += rho * gh * gh.transpose();
        const double t_rest = t - gh.dot(d0);
        const Vector lin = g + rho * t_rest * gh - a * x0;
        const Vector v = l1_qp(a, lin, lambda, x0 + d0);
        for (Eigen::Index r = 0; r < m; ++r) d(j, keep[r]) = v(r) - x0(r);
        t = t_rest + gh.dot(v - x0);
      }
    }
    if (d.cwiseAbs().maxCoeff() <= settings.inner_tol) break;

    const double decrease = cur.grad.cwiseProduct(d).sum() + lambda * ((w + d).cwiseAbs().sum() - w.cwiseAbs().sum());
    double step = 1.0;
    bool accepted = false;
    Matrix w_next;
    AugmentedValue next;
    double f_next = 0.0;
    for (int bt = 0; bt < 50; ++bt) {
      w_next = w + step * d;
      next = eval(w_next);
      f_next = next.smooth + lambda * w_next.cwiseAbs().sum();
      if (std::isfinite(f_next) && f_next <= f + kArmijo * step * std::min(decrease, 0.0)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    damping = step < 1.0 ? std::max(4.0 * damping, 1e-6 * cov.diagonal().maxCoeff()) : 0.25 * damping;
    if (damping < 1e-12) damping = 0.0;

    const double f_prev = f;
    w = std::move(w_next);
    cur = std::move(next);
    f = f_next;
    observe(it, f);
    if (f_prev - f <= settings.inner_ftol * std::max(1.0, std::abs(f))) break;
  }
  return {w, cur.ac.h};
}

// Removes the weakest edge lying on a directed cycle until none is left.
inline int break_cycles(Matrix& w) {
  int removed = 0;
  for (;;) {
    const Matrix reach = bool_star(threshold_binary(w, 0.0), static_cast<int>(w.rows()));
    if (reach.diagonal().isZero(0.0)) return removed;
    double weakest = std::numeric_limits<double>::infinity();
    Eigen::Index wi = -1, wj = -1;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        // edge j -> i closes a cycle when i already reaches j
        if (w(i, j) != 0.0 && (i == j || reach(j, i) != 0.0) && std::abs(w(i, j)) < weakest) {
          weakest = std::abs(w(i, j));
          wi = i;
          wj = j;
        }
      }
    }
    w(wi, wj) = 0.0;
    ++removed;
  }
}

}  // namespace detail

/**
 * Fits a DAG to centered samples x (rows are samples). Entries with
 * |w| <= threshold_c0 are zeroed afterwards, as are the exposure row and the
 * outcome column. Any cycle surviving the threshold is broken by dropping its
 * weakest edge.
 *
 * rho is capped at rho_max; alpha keeps being updated after that. Throws
 * ConvergenceError if h_tol is not reached within max_outer iterations.
 */
inline NotearsFit fit_notears(const Matrix& x, const NotearsSettings& settings) {
  if (x.rows() < 2) throw std::invalid_argument("fit_notears: need at least two samples");
  if (!(settings.rho_init > 0.0) || !(settings.h_tol > 0.0) || settings.lambda < 0.0) {
    throw std::invalid_argument("fit_notears: invalid settings");
  }
  const Eigen::Index dim = x.cols();
  const double n = static_cast<double>(x.rows());
  const Matrix cov = x.transpose() * x / n;
  const detail::AugmentedLagrangian objective(cov);
  const double lambda = settings.lambda;

  NotearsFit out;
  Matrix w_est = Matrix::Zero(dim, dim);
  double rho = settings.rho_init;
  double alpha = settings.alpha_init;
  double h = std::numeric_limits<double>::infinity();

  auto solve_inner = [&](const Matrix& start, int outer, double& h_out) {
    auto eval = [&](const Matrix& w) { return objective.evaluate(w, rho, alpha); };
    auto result = detail::prox_newton(start, eval, cov, lambda, rho, alpha, settings, [&](int it, double f) {
      ++out.inner_iterations;
      if (settings.observer) settings.observer({outer, it, rho, f});
    });
    h_out = result.second;
    return std::move(result.first);
  };

  for (int outer = 0; outer < settings.max_outer; ++outer) {
    ++out.outer_iterations;
    Matrix w_new;
    double h_new = h;
    for (;;) {
      w_new = solve_inner(w_est, outer, h_new);
      if (h_new <= settings.progress_ratio * h || rho >= settings.rho_max) break;
      rho = std::min(10.0 * rho, settings.rho_max);
    }
    w_est = std::move(w_new);
    h = h_new;
    if (h <= settings.h_tol) break;
    alpha += rho * h;
  }
  out.h_raw = h;
  out.rho = rho;
  if (!(h <= settings.h_tol)) {
    throw ConvergenceError("fit_notears: acyclicity tolerance not reached (h = " + std::to_string(h) + ")",
                           h, w_est);
  }

  Matrix w = w_est;
  w = (w.array().abs() > settings.threshold_c0).select(w, 0.0);
  w.row(0).setZero();
  w.col(dim - 1).setZero();
  w.diagonal().setZero();
  out.removed_cycle_edges = detail::break_cycles(w);
  out.w = std::move(w);
  return out;
}

// ---------------------------------------------------------------------------
// Penalized regression

enum class Penalty { Lasso, Mcp };
enum class Tuning { Fixed, BicGrid };

struct PenaltySpec {
  Penalty kind = Penalty::Mcp;
  double lambda = 0.1;
  double gamma = 3.0;
  Tuning tuning = Tuning::Fixed;
  std::vector<double> grid;  // candidate lambdas for BicGrid
};

/// p(t) for t >= 0.
inline double penalty_value(const PenaltySpec& spec, double lambda, double t) {
  if (spec.kind == Penalty::Lasso) return lambda * t;
  const double knot = spec.gamma * lambda;
  return t <= knot ? lambda * t - t * t / (2.0 * spec.gamma) : 0.5 * spec.gamma * lambda * lambda;
}

/// `count` log-spaced values from lo to hi, largest first.
inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  if (count == 1) return {hi};
  for (int k = 0; k < count; ++k) {
    const double frac = static_cast<double>(k) / (count - 1);
    g.push_back(std::exp(std::log(hi) + frac * (std::log(lo) - std::log(hi))));
  }
  return g;
}

/// MCP(gamma = 3) tuned by BIC over 20 values in [0.01, 1] * 10 sqrt(log n / n).
inline PenaltySpec default_mcp_bic(int n) {
  const double scale = 10.0 * std::sqrt(std::log(std::max(2, n)) / std::max(2, n));
  PenaltySpec spec;
  spec.kind = Penalty::Mcp;
  spec.gamma = 3.0;
  spec.tuning = Tuning::BicGrid;
  spec.grid = log_grid(0.01 * scale, scale, 20);
  spec.lambda = spec.grid.back();
  return spec;
}

/// Second-moment summaries of a design: gram = X'X/n, plus sample count.
struct GramDesign {
  Matrix gram;
  int n = 0;
};

inline GramDesign make_gram(const Matrix& x) {
  return {x.transpose() * x / static_cast<double>(x.rows()), static_cast<int>(x.rows())};
}

struct PenalizedResult {
  Vector beta;
  double lambda = 0.0;
  double rss = 0.0;  // sum of squared residuals
  double bic = 0.0;
  int sweeps = 0;
};

namespace detail {

// argmin_b  a b^2 - 2 z b + p(|b|)
inline double univariate_solution(const PenaltySpec& spec, double lambda, double a, double z) {
  const double sgn = z < 0.0 ? -1.0 : 1.0;
  const double az = std::abs(z);
  if (spec.kind == Penalty::Lasso) return sgn * std::max(az - 0.5 * lambda, 0.0) / a;

  const double knot = spec.gamma * lambda;
  auto q = [&](double b) { return a * b * b - 2.0 * z * b + penalty_value(spec, lambda, std::abs(b)); };
  const double curvature = a - 1.0 / (2.0 * spec.gamma);
  double inner = curvature > 0.0 ? sgn * std::min(std::max(az - 0.5 * lambda, 0.0) / curvature, knot) : sgn * knot;
  double outer = z / a;
  if (std::abs(outer) < knot) outer = sgn * knot;

  double best = 0.0, best_q = 0.0;
  for (double cand : {inner, outer}) {
    const double v = q(cand);
    if (v < best_q) {
      best_q = v;
      best = cand;
    }
  }
  return best;
}

inline void coordinate_descent(const Matrix& gram, std::span<const int> support, const PenaltySpec& spec,
                               double lambda, Vector& beta, Vector& grad, int& sweeps, int max_sweeps = 10000) {
  // grad = xty - gram * beta, kept current
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    ++sweeps;
    double max_change = 0.0;
    for (int k : support) {
      const double a = gram(k, k);
      if (a <= 1e-12) continue;
      const double z = grad(k) + a * beta(k);
      const double b = univariate_solution(spec, lambda, a, z);
      const double delta = b - beta(k);
      if (delta != 0.0) {
        for (int j : support) grad(j) -= gram(j, k) * delta;
        beta(k) = b;
        max_change = std::max(max_change, std::abs(delta) * std::sqrt(a));
      }
    }
    if (max_change < 1e-10) return;
  }
}

// 0.5 b'Ab + q'b + sum p(|b_k|)
inline double qp_penalized(const Matrix& a, const Vector& q, const PenaltySpec& spec, double lambda, const Vector& b) {
  double pen = 0.0;
  for (Eigen::Index k = 0; k < b.size(); ++k) pen += penalty_value(spec, lambda, std::abs(b(k)));
  return 0.5 * b.dot(a * b) + q.dot(b) + pen;
}

/**
 * MCP is quadratic once each coefficient's sign and region (zero, |b| < gamma
 * lambda, or beyond) are fixed. Solves that linear system for the pattern of b
 * and accepts the result only if it keeps the pattern, satisfies the zero
 * coefficients' subgradient condition and does not increase the objective.
 */
inline bool mcp_pattern_step(const Matrix& a, const Vector& q, const PenaltySpec& spec, double lambda, Vector& b) {
  const double knot = spec.gamma * lambda;
  std::vector<Eigen::Index> act;
  for (Eigen::Index k = 0; k < b.size(); ++k)
    if (b(k) != 0.0) act.push_back(k);
  const auto k = static_cast<Eigen::Index>(act.size());
  Matrix m(k, k);
  Vector rhs(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index i = act[r];
    const bool inner = std::abs(b(i)) < knot;
    for (Eigen::Index c = 0; c < k; ++c) m(r, c) = a(i, act[c]);
    rhs(r) = -q(i);
    if (inner) {
      m(r, r) -= 1.0 / spec.gamma;
      rhs(r) -= (b(i) > 0.0 ? 1.0 : -1.0) * lambda;
    }
  }
  const Vector sol = m.partialPivLu().solve(rhs);
  if (!sol.allFinite()) return false;
  Vector x = Vector::Zero(b.size());
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index i = act[r];
    const bool inner = std::abs(b(i)) < knot;
    if (sol(r) * b(i) <= 0.0 || (std::abs(sol(r)) < knot) != inner) return false;
    x(i) = sol(r);
  }
  const Vector grad = a * x + q;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (x(i) == 0.0 && std::abs(grad(i)) > lambda * (1.0 + 1e-9)) return false;
  if (qp_penalized(a, q, spec, lambda, x) > qp_penalized(a, q, spec, lambda, b)) return false;
  b = std::move(x);
  return true;
}

/**
 * Minimizer over the support for one lambda. MCP uses the local linear
 * approximation: a weighted lasso with weights p'(|b_k|), each solved exactly
 * with l1_qp, until the sign/region pattern settles and mcp_pattern_step
 * finishes exactly. Neither step increases the objective, and both cope with
 * strongly correlated columns, where plain coordinate descent crawls.
 */
inline void solve_support(const Matrix& gram, const Vector& xty, std::span<const int> support, const PenaltySpec& spec,
                          double lambda, Vector& beta) {
  const auto k = static_cast<Eigen::Index>(support.size());
  Matrix a(k, k);
  Vector q(k), b(k);
  double scale = 1.0;
  for (Eigen::Index r = 0; r < k; ++r) scale = std::max(scale, gram(support[r], support[r]));
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) a(r, c) = 2.0 * gram(support[r], support[c]);
    a(r, r) += 1e-14 * scale;
    q(r) = -2.0 * xty(support[r]);
    b(r) = beta(support[r]);
  }
  if (spec.kind == Penalty::Lasso) {
    b = l1_qp(a, q, lambda, b);
  } else {
    for (int iter = 0; iter < 100; ++iter) {
      const Vector weights = (lambda - b.array().abs() / spec.gamma).max(0.0).matrix();
      Vector next = l1_qp(a, q, weights, b);
      const double change = (next - b).cwiseAbs().maxCoeff();
      b = std::move(next);
      if (change <= 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff())) break;
      if (mcp_pattern_step(a, q, spec, lambda, b)) break;
    }
  }
  for (Eigen::Index r = 0; r < k; ++r) beta(support[r]) = b(r);
}

}  // namespace detail

/**
 * Penalized least squares from Gram statistics. `gram` is X'X/n, `xty` is
 * X'y/n and `yty` is y'y/n. Coefficients outside `support` stay zero.
 */
inline PenalizedResult fit_penalized_gram(const Matrix& gram, const Vector& xty, double yty, int n,
                                          std::span<const int> support, const PenaltySpec& spec) {
  if (spec.kind == Penalty::Mcp && !(spec.gamma > 1.0)) throw std::invalid_argument("MCP needs gamma > 1");
  const Eigen::Index p = gram.rows();
  for (int k : support) {
    if (k < 0 || k >= p) throw std::out_of_range("fit_penalized: support index out of range");
  }
  PenalizedResult best;
  best.beta = Vector::Zero(p);
  best.rss = n * yty;
  best.bic = std::numeric_limits<double>::infinity();
  if (support.empty()) {
    best.bic = n * std::log(std::max(yty, 1e-300));
    return best;
  }

  std::vector<double> lambdas =
      spec.tuning == Tuning::BicGrid ? spec.grid : std::vector<double>{spec.lambda};
  if (lambdas.empty()) throw std::invalid_argument("fit_penalized: empty lambda grid");
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

  Vector beta = Vector::Zero(p);
  Vector grad = xty;
  int sweeps = 0;
  for (double lambda : lambdas) {
    if (lambda < 0.0) throw std::invalid_argument("fit_penalized: negative lambda");
    detail::solve_support(gram, xty, support, spec, lambda, beta);
    grad = xty - gram * beta;
    detail::coordinate_descent(gram, support, spec, lambda, beta, grad, sweeps, 20);
    const double rss_n = std::max(yty - 2.0 * beta.dot(xty) + beta.dot(gram * beta), 0.0);
    int df = 0;
    for (int k : support) df += beta(k) != 0.0;
    const double bic = n * std::log(std::max(rss_n, 1e-300)) + std::log(static_cast<double>(n)) * df;
    if (bic < best.bic) {
      best.beta = beta;
      best.lambda = lambda;
      best.rss = n * rss_n;
      best.bic = bic;
    }
  }
  best.sweeps = sweeps;
  return best;
}

/// Penalized regression of y on the columns of x listed in `support`.
inline Vector fit_penalized(const Vector& y, const Matrix& x, std::span<const int> support, const PenaltySpec& spec) {
  if (y.size() != x.rows()) throw ShapeError("fit_penalized: y and x have different sample counts");
  const double n = static_cast<double>(x.rows());
  const Matrix gram = x.transpose() * x / n;
  const Vector xty = x.transpose() * y / n;
  return fit_penalized_gram(gram, xty, y.squaredNorm() / n, static_cast<int>(x.rows()), support, spec).beta;
}

/// (1/n)||y - X b||^2 + sum_k p(|b_k|) at a fixed lambda.
inline double penalized_objective(const Vector& y, const Matrix& x, const Vector& beta, const PenaltySpec& spec,
                                  double lambda) {
  double pen = 0.0;
  for (Eigen::Index k = 0; k < beta.size(); ++k) pen += penalty_value(spec, lambda, std::abs(beta(k)));
  return (y - x * beta).squaredNorm() / static_cast<double>(x.rows()) + pen;
}

}  // namespace logan
