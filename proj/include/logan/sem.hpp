#pragma once

/**
 * @file sem.hpp
 * @brief Gaussian linear structural equation model
 *
 *   X - mu = W (X - mu) + eps,   eps ~ N(0, sigma^2 I),
 *
 * with node 0 the exposure, nodes 1..d the mediators and node d+1 the outcome.
 * Also hosts the random-DAG scenario generator and the mediation strength
 * delta(q) = W*(d+1, q) * W*(q, 0).
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "logan/boolmat.hpp"
#include "logan/dataset.hpp"
#include "logan/rng.hpp"

namespace logan {

struct SemModel {
  Matrix w;            // (d+2) x (d+2); w(j, i) is the effect of i on j
  Vector mu;           // node means
  double sigma_star = 1.0;

  int dim() const { return static_cast<int>(w.rows()); }
  int mediators() const { return dim() - 2; }
};

/// Throws ModelError unless the model is a valid mediation DAG.
inline void validate(const SemModel& model) {
  const auto& w = model.w;
  if (w.rows() != w.cols() || w.rows() < 3) throw ModelError("W must be square with dimension >= 3");
  if (model.mu.size() != w.rows()) throw ModelError("mu length does not match W");
  if (!(model.sigma_star > 0.0) || !std::isfinite(model.sigma_star)) {
    throw ModelError("sigma_star must be positive");
  }
  if (!w.allFinite()) throw ModelError("W has non-finite entries");
  if (!w.row(0).isZero(0.0)) throw ModelError("exposure has parents (row 0 of W is nonzero)");
  if (!w.col(w.cols() - 1).isZero(0.0)) {
    throw ModelError("outcome has children (last column of W is nonzero)");
  }
  if (!is_acyclic(w)) throw ModelError("W is not acyclic");
}

/// Topological order of the support of w (parents before children).
inline std::vector<Node> topological_order(const Matrix& w) {
  const int dim = static_cast<int>(w.rows());
  std::vector<int> indegree(dim, 0);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i)
      if (w(j, i) != 0.0) ++indegree[j];
  std::vector<Node> order;
  std::vector<char> done(dim, 0);
  // Smallest ready node first keeps lower-triangular inputs in natural order.
  while (static_cast<int>(order.size()) < dim) {
    int pick = -1;
    for (int j = 0; j < dim; ++j) {
      if (!done[j] && indegree[j] == 0) {
        pick = j;
        break;
      }
    }
    if (pick < 0) throw ModelError("W is not acyclic");
    done[pick] = 1;
    order.push_back(pick);
    for (int j = 0; j < dim; ++j)
      if (w(j, pick) != 0.0) --indegree[j];
  }
  return order;
}

/**
 * n i.i.d. draws from the model. Noise is drawn row by row (sample-major) and
 * nodes are filled in topological order, which avoids forming (I - W)^-1.
 */
inline Dataset sample(const SemModel& model, int n, std::uint64_t seed) {
  validate(model);
  if (n < 1) throw std::invalid_argument("sample: n must be positive");
  const int dim = model.dim();
  const auto order = topological_order(model.w);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, model.sigma_star);

  Matrix centered(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) centered(i, j) = normal(rng);
  for (Node j : order) {
    for (int p = 0; p < dim; ++p) {
      const double wjp = model.w(j, p);
      if (wjp != 0.0) centered.col(j) += wjp * centered.col(p);
    }
  }
  centered.rowwise() += model.mu.transpose();
  return make_dataset(std::move(centered));
}

/// Population covariance sigma^2 (I - W)^-1 (I - W)^-T.
inline Matrix population_covariance(const SemModel& model) {
  const int dim = model.dim();
  const Matrix inv = (Matrix::Identity(dim, dim) - model.w).inverse();
  return model.sigma_star * model.sigma_star * inv * inv.transpose();
}

// ---------------------------------------------------------------------------
// Scenario generator

struct ScenarioConfig {
  int d = 50;
  double p1 = 0.05;  // edges leaving the exposure or entering the outcome
  double p2 = 0.15;  // all other lower-triangular entries
  int n = 200;
  std::uint64_t seed = 0;
};

struct ScenarioPreset {
  std::string name;
  int d;
  double p1;
  double p2;
  int n_small;
  int n_large;
};

inline const std::vector<ScenarioPreset>& scenario_presets() {
  static const std::vector<ScenarioPreset> presets = {
      {"A", 50, 0.05, 0.15, 100, 200},
      {"B-body", 100, 0.03, 0.1, 250, 500},
      {"B-appendix", 100, 0.025, 0.075, 250, 500},
      {"C", 150, 0.02, 0.05, 250, 500},
  };
  return presets;
}

inline const ScenarioPreset& find_preset(const std::string& name) {
  for (const auto& p : scenario_presets())
    if (p.name == name) return p;
  if (name == "B") return find_preset("B-body");
  throw std::invalid_argument("unknown scenario '" + name + "' (expected A, B-body, B-appendix or C)");
}

inline void validate(const ScenarioConfig& cfg) {
  if (cfg.d < 1) throw ModelError("scenario: d must be >= 1");
  if (!(cfg.p1 >= 0.0 && cfg.p1 <= 1.0) || !(cfg.p2 >= 0.0 && cfg.p2 <= 1.0)) {
    throw ModelError("scenario: edge probabilities must lie in [0, 1]");
  }
  if (cfg.n < 4) throw ModelError("scenario: n must be >= 4");
}

/**
 * Random strictly lower-triangular W. Entry (j1, j2), j1 > j2, is
 * Bernoulli(p) * U, with p = p1 when j2 = 0 or j1 = d+1 and p = p2 otherwise,
 * and U uniform on [-2, -0.5] U [0.5, 2]. Three draws are consumed per entry
 * whatever the Bernoulli outcome, so the stream layout does not depend on p.
 */
inline SemModel generate_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  const int dim = cfg.d + 2;
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> magnitude(0.5, 2.0);

  SemModel model;
  model.w = Matrix::Zero(dim, dim);
  for (int j1 = 1; j1 < dim; ++j1) {
    for (int j2 = 0; j2 < j1; ++j2) {
      const double p = (j2 == 0 || j1 == dim - 1) ? cfg.p1 : cfg.p2;
      const bool present = unit(rng) < p;
      const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
      const double size = magnitude(rng);
      if (present) model.w(j1, j2) = sign * size;
    }
  }
  model.mu = Vector::Ones(dim);
  model.sigma_star = 1.0;
  return model;
}

/// delta(q) for q = 1..d (element q-1). Zero exactly for non-mediators.
inline Vector mediation_strength(const SemModel& model) {
  validate(model);
  const Matrix star = bool_star(model.w.cwiseAbs());
  const int d = model.mediators();
  Vector delta(d);
  for (int q = 1; q <= d; ++q) delta(q - 1) = star(d + 1, q) * star(q, 0);
  return delta;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const SemModel& model) {
  nlohmann::json w = nlohmann::json::array();
  for (int i = 0; i < model.dim(); ++i) {
    std::vector<double> row;
    for (int j = 0; j < model.dim(); ++j) row.push_back(model.w(i, j));
    w.push_back(row);
  }
  std::vector<double> mu(model.mu.data(), model.mu.data() + model.mu.size());
  return {{"d", model.mediators()}, {"w", w}, {"mu", mu}, {"sigma_star", model.sigma_star}};
}

inline SemModel sem_from_json(const nlohmann::json& j) {
  SemModel model;
  try {
    const auto& rows = j.at("w");
    const auto dim = static_cast<Eigen::Index>(rows.size());
    model.w.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != dim) throw ModelError("W rows must have equal length");
      for (Eigen::Index c = 0; c < dim; ++c) model.w(r, c) = rows[r][c].get<double>();
    }
    const auto mu = j.at("mu").get<std::vector<double>>();
    model.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    model.sigma_star = j.at("sigma_star").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model JSON: ") + e.what());
  }
  validate(model);
  return model;
}

}  // namespace logan
