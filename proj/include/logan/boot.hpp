#pragma once

/**
 * @file boot.hpp
 * @brief Gaussian multiplier bootstrap for max-type edge statistics.
 *
 * Draw b uses multipliers e(i, j) for every complement sample i and node j,
 * generated from its own seed, so the draws do not depend on which edges are
 * requested or on the number of threads. Edges sharing the row j1 share the
 * column e(., j1).
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "logan/debias.hpp"
#include "logan/parallel.hpp"
#include "logan/rng.hpp"

namespace logan {

struct BootstrapSettings {
  int m = 2000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

inline void validate(const BootstrapSettings& s) {
  if (s.m < 100) throw std::invalid_argument("bootstrap: m must be at least 100");
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw std::invalid_argument("bootstrap: alpha must lie in (0, 1)");
}

/// eta* = sqrt(n_c) sigma (r'e) / denominator
inline double eta_star(const EdgeProjection& edge, const Vector& e, double sigma_hat) {
  if (e.size() != edge.residual.size()) throw ShapeError("eta_star: multiplier length differs from n_c");
  const double n_c = static_cast<double>(e.size());
  return std::sqrt(n_c) * sigma_hat * edge.residual.dot(e) / edge.denominator;
}

/// Multipliers of draw b: n_c x dim standard normals, filled row by row.
inline Matrix multipliers(std::uint64_t seed, int draw, int n_c, int dim) {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(draw)}));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix e(n_c, dim);
  for (int i = 0; i < n_c; ++i)
    for (int j = 0; j < dim; ++j) e(i, j) = normal(rng);
  return e;
}

/// eta* for every edge and draw: (#edges) x m.
inline Matrix bootstrap_edges(const DecorrelatedHalf& half, int n_c, int dim, double sigma_hat,
                              const BootstrapSettings& settings) {
  validate(settings);
  const auto count = static_cast<Eigen::Index>(half.edges.size());
  Matrix eta(count, settings.m);
  if (count == 0) return eta;
  Matrix scaled(n_c, count);  // residual / denominator, per edge
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto& edge = half.edges[static_cast<std::size_t>(k)];
    if (edge.residual.size() != n_c) throw ShapeError("bootstrap_edges: residual length differs from n_c");
    scaled.col(k) = edge.residual / edge.denominator;
  }
  const double factor = std::sqrt(static_cast<double>(n_c)) * sigma_hat;
  parallel_for(static_cast<std::size_t>(settings.m), [&](std::size_t b) {
    const Matrix e = multipliers(settings.seed, static_cast<int>(b), n_c, dim);
    for (Eigen::Index k = 0; k < count; ++k) {
      const int j1 = half.edges[static_cast<std::size_t>(k)].j1;
      eta(k, static_cast<Eigen::Index>(b)) = factor * scaled.col(k).dot(e.col(j1));
    }
  });
  return eta;
}

/// T(b) = max over the listed edge rows of |eta*(b)|; zero when the list is empty.
inline Vector max_statistics(const Matrix& eta, std::span<const int> rows) {
  Vector t = Vector::Zero(eta.cols());
  for (int r : rows) t = t.cwiseMax(eta.row(r).transpose().cwiseAbs());
  return t;
}

/// ceil(level * m)-th order statistic of the samples (1-based), no interpolation.
inline double upper_quantile(std::vector<double> sorted, double level) {
  if (sorted.empty()) throw std::invalid_argument("upper_quantile: no samples");
  std::sort(sorted.begin(), sorted.end());
  const auto m = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(level * m - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

struct CriticalValue {
  double c_hat = std::numeric_limits<double>::infinity();
  Vector t_samples;
};

/// Upper alpha/2 bootstrap quantile of T over the edge set S; +inf for empty S.
inline CriticalValue critical_value(const Matrix& eta, std::span<const int> rows, double alpha) {
  CriticalValue out;
  out.t_samples = max_statistics(eta, rows);
  if (rows.empty()) return out;
  std::vector<double> t(out.t_samples.data(), out.t_samples.data() + out.t_samples.size());
  out.c_hat = upper_quantile(std::move(t), 1.0 - alpha / 2.0);
  return out;
}

/// Fraction of draws with T >= sqrt(n_c) * w_star_entry.
inline double p_value(double w_star_entry, const Vector& t_samples, int n_complement) {
  if (t_samples.size() == 0) throw std::invalid_argument("p_value: no bootstrap samples");
  const double stat = std::sqrt(static_cast<double>(n_complement)) * w_star_entry;
  Eigen::Index hits = 0;
  for (Eigen::Index b = 0; b < t_samples.size(); ++b) hits += t_samples(b) >= stat;
  return static_cast<double>(hits) / static_cast<double>(t_samples.size());
}

}  // namespace logan
