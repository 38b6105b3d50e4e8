#pragma once

/**
 * @file mediate.hpp
 * @brief Mediator tests: single split, multi-split, and FDR selection.
 *
 * H0(q): no path exposure -> q -> outcome. It is the union of the sub-nulls
 * "no path 0 -> q" and "no path q -> d+1". A half rejects H0(q) when both
 * sub-nulls are rejected at level alpha/2 each; the single-split test rejects
 * when at least one half does.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "logan/boot.hpp"
#include "logan/dataset.hpp"
#include "logan/debias.hpp"
#include "logan/rng.hpp"

namespace logan {

struct LoganSettings {
  NotearsSettings notears;            // lambda is replaced when auto_lambda is set
  bool auto_lambda = true;            // lambda = kappa sqrt(log n / n), n = |I_l|
  double kappa = 0.5;
  std::optional<PenaltySpec> penalty; // default: BIC grid per sample size, see below
  Penalty default_kind = Penalty::Mcp; // penalty of the default BIC grid
  int m = 2000;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Splitting

struct SplitPlan {
  std::array<std::vector<int>, 2> halves;  // I_1 (size ceil(n/2)) and I_2, each sorted
};

inline SplitPlan split(int n, std::uint64_t seed) {
  if (n < 4) throw DataError("split: need at least 4 samples");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  const int first = (n + 1) / 2;
  SplitPlan plan;
  plan.halves[0].assign(perm.begin(), perm.begin() + first);
  plan.halves[1].assign(perm.begin() + first, perm.end());
  for (auto& h : plan.halves) std::sort(h.begin(), h.end());
  return plan;
}

// ---------------------------------------------------------------------------
// One split

struct HalfAnalysis {
  int half = 1;
  int n_fit = 0;
  int n_eval = 0;
  bool failed = false;
  std::string failure;
  HalfFit fit;
  DecorrelatedHalf decorrelated;
  Matrix eta;     // bootstrap eta*, (#edges) x m
  Matrix w_star;  // bool_star(|W^|)
};

struct SplitAnalysis {
  int split_index = 0;
  SplitPlan plan;
  std::array<HalfAnalysis, 2> halves;
  VarianceEstimate sigma2;
  int m = 0;
  int dim = 0;
};

inline NotearsSettings resolved_notears(const LoganSettings& s, int n_fit) {
  NotearsSettings ns = s.notears;
  if (s.auto_lambda) ns.lambda = default_notears_lambda(n_fit, s.kappa);
  return ns;
}

inline PenaltySpec resolved_penalty(const LoganSettings& s, int n) {
  if (s.penalty) return *s.penalty;
  PenaltySpec p = default_mcp_bic(n);
  p.kind = s.default_kind;
  return p;
}

/// Edges needed to test the given mediators: S(0, q) and S(q, d+1) for each.
inline std::vector<Edge> edges_for(const HalfFit& fit, std::span<const Node> mediators) {
  const int dim = fit.dim();
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(dim, dim);
  std::vector<Edge> out;
  for (Node q : mediators) {
    for (const auto& s : {edge_set_S(fit, 0, q), edge_set_S(fit, q, dim - 1)}) {
      for (const auto& e : s) {
        if (!seen(e.first, e.second)) {
          seen(e.first, e.second) = 1;
          out.push_back(e);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return out;
}

/**
 * Fits both halves of one split and prepares everything the sub-tests need
 * for the listed mediators. `x` must be centered. A half whose DAG fit fails
 * is marked failed and later retains every hypothesis.
 */
inline SplitAnalysis analyze_split(const Matrix& x, int split_index, const LoganSettings& settings,
                                   std::span<const Node> mediators) {
  const int n = static_cast<int>(x.rows());
  const int dim = static_cast<int>(x.cols());
  for (Node q : mediators)
    if (q < 1 || q > dim - 2) throw std::out_of_range("mediator index " + std::to_string(q) + " out of range");

  SplitAnalysis out;
  out.split_index = split_index;
  out.m = settings.m;
  out.dim = dim;
  out.plan = split(n, derive_seed(settings.seed, {stream::split, static_cast<std::uint64_t>(split_index)}));

  std::array<Matrix, 2> x_half;
  for (int l = 0; l < 2; ++l) x_half[l] = select_rows(x, out.plan.halves[l]);

  for (int l = 0; l < 2; ++l) {
    HalfAnalysis& h = out.halves[l];
    h.half = l + 1;
    h.n_fit = static_cast<int>(x_half[l].rows());
    h.n_eval = static_cast<int>(x_half[1 - l].rows());
    try {
      h.fit = fit_half(x_half[l], l + 1, resolved_notears(settings, h.n_fit), resolved_penalty(settings, h.n_fit));
    } catch (const NumericalError& e) {
      h.failed = true;
      h.failure = e.what();
    }
  }

  std::vector<Matrix> evals, bars;
  for (int l = 0; l < 2; ++l) {
    if (out.halves[l].failed) continue;
    evals.push_back(x_half[1 - l]);
    bars.push_back(out.halves[l].fit.w_bar);
  }
  if (!evals.empty()) out.sigma2 = variance_estimate(evals, bars);

  for (int l = 0; l < 2; ++l) {
    HalfAnalysis& h = out.halves[l];
    if (h.failed) continue;
    const auto wanted = edges_for(h.fit, mediators);
    h.decorrelated = decorrelate_half(x_half[1 - l], h.fit, wanted, resolved_penalty(settings, h.n_eval));
    BootstrapSettings bs;
    bs.m = settings.m;
    bs.seed = derive_seed(settings.seed,
                          {stream::bootstrap, static_cast<std::uint64_t>(split_index), static_cast<std::uint64_t>(l)});
    h.eta = bootstrap_edges(h.decorrelated, h.n_eval, dim, std::sqrt(std::max(out.sigma2.value, 0.0)), bs);
    h.w_star = bool_star(h.decorrelated.w_hat.cwiseAbs(), dim);
  }
  return out;
}

struct SubTest {
  Node q1 = 0;
  Node q2 = 0;
  int s_size = 0;          // tested edges (degenerate ones excluded)
  double statistic = 0.0;  // sqrt(n_c) * W^*(q2, q1)
  int exceed = 0;          // draws with T >= statistic
  int m = 0;
  double c_hat = std::numeric_limits<double>::infinity();  // at the report's alpha
  double p_value = 1.0;
  bool reject = false;

  /// Same decision as statistic > c_hat, evaluated at another level.
  bool rejects_at(double alpha) const {
    if (s_size == 0 || m == 0) return false;
    const auto k = static_cast<int>(std::ceil((1.0 - alpha / 2.0) * m - 1e-9));
    return exceed <= m - std::clamp(k, 1, m);
  }
};

inline SubTest sub_test(const HalfAnalysis& h, Node q1, Node q2, double alpha, int m) {
  SubTest t;
  t.q1 = q1;
  t.q2 = q2;
  t.m = m;
  if (h.failed) return t;
  std::vector<int> rows;
  for (const auto& [i, j] : edge_set_S(h.fit, q1, q2)) {
    const int r = h.decorrelated.index(i, j);
    if (r >= 0) rows.push_back(r);
  }
  t.s_size = static_cast<int>(rows.size());
  const CriticalValue cv = critical_value(h.eta, rows, alpha);
  t.c_hat = cv.c_hat;
  t.statistic = std::sqrt(static_cast<double>(h.n_eval)) * h.w_star(q2, q1);
  for (Eigen::Index b = 0; b < cv.t_samples.size(); ++b) t.exceed += cv.t_samples(b) >= t.statistic;
  t.p_value = p_value(h.w_star(q2, q1), cv.t_samples, h.n_eval);
  t.reject = t.statistic > t.c_hat;
  return t;
}

struct MediationReport {
  Node q = 0;
  double alpha = 0.05;
  std::array<std::array<SubTest, 2>, 2> sub;  // [half][0: exposure -> q, 1: q -> outcome]
  std::array<bool, 2> half_reject{false, false};
  bool reject = false;
  double sigma2 = 0.0;
  std::array<bool, 2> half_failed{false, false};
  std::array<int, 2> degenerate_edges{0, 0};

  bool rejects_at(double level) const {
    for (int l = 0; l < 2; ++l)
      if (sub[l][0].rejects_at(level) && sub[l][1].rejects_at(level)) return true;
    return false;
  }
};

inline MediationReport mediator_report(const SplitAnalysis& a, Node q, double alpha) {
  MediationReport r;
  r.q = q;
  r.alpha = alpha;
  r.sigma2 = a.sigma2.value;
  for (int l = 0; l < 2; ++l) {
    const HalfAnalysis& h = a.halves[l];
    r.half_failed[l] = h.failed;
    r.degenerate_edges[l] = static_cast<int>(h.decorrelated.degenerate.size());
    r.sub[l][0] = sub_test(h, 0, q, alpha, a.m);
    r.sub[l][1] = sub_test(h, q, a.dim - 1, alpha, a.m);
    r.half_reject[l] = r.sub[l][0].reject && r.sub[l][1].reject;
  }
  r.reject = r.half_reject[0] || r.half_reject[1];
  return r;
}

inline Matrix centered_values(const Dataset& data) { return data.centered ? data.values : center(data).values; }

inline std::vector<Node> all_mediators(int d) {
  std::vector<Node> qs(static_cast<std::size_t>(d));
  std::iota(qs.begin(), qs.end(), 1);
  return qs;
}

/// Single-split test of H0(q).
inline MediationReport test_mediator(const Dataset& data, Node q, double alpha, const LoganSettings& settings) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const std::vector<Node> qs{q};
  return mediator_report(analyze_split(centered_values(data), 0, settings, qs), q, alpha);
}

/// Single-split tests of several mediators sharing one fit per half.
inline std::vector<MediationReport> test_mediators(const Dataset& data, std::span<const Node> qs, double alpha,
                                                   const LoganSettings& settings) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const SplitAnalysis a = analyze_split(centered_values(data), 0, settings, qs);
  std::vector<MediationReport> out;
  for (Node q : qs) out.push_back(mediator_report(a, q, alpha));
  return out;
}

// ---------------------------------------------------------------------------
// Multi-split

/// min(1, q_gamma(p / gamma)), q_gamma the ceil(gamma N)-th order statistic.
inline double quantile_combine(std::vector<double> p, double gamma) {
  if (p.empty()) throw std::invalid_argument("quantile_combine: no p-values");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("quantile_combine: gamma must lie in (0, 1)");
  std::sort(p.begin(), p.end());
  auto k = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(p.size()) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, p.size());
  return std::min(1.0, p[k - 1] / gamma);
}

struct MultiSplitReport {
  Node q = 0;
  double alpha = 0.05;
  double gamma = 0.15;
  int splits = 0;
  std::vector<double> p_exposure;  // 2S sub-p-values for "no path 0 -> q"
  std::vector<double> p_outcome;   // 2S sub-p-values for "no path q -> d+1"
  double p_exposure_combined = 1.0;
  double p_outcome_combined = 1.0;
  double p_value = 1.0;
  bool reject = false;
  int failed_halves = 0;
};

/// Combines sub-p-values of mediator q across the given split analyses.
inline MultiSplitReport combine_splits(std::span<const SplitAnalysis> splits, Node q, double alpha, double gamma) {
  MultiSplitReport r;
  r.q = q;
  r.alpha = alpha;
  r.gamma = gamma;
  r.splits = static_cast<int>(splits.size());
  for (const auto& a : splits) {
    const MediationReport m = mediator_report(a, q, alpha);
    for (int l = 0; l < 2; ++l) {
      r.p_exposure.push_back(m.sub[l][0].p_value);
      r.p_outcome.push_back(m.sub[l][1].p_value);
      r.failed_halves += m.half_failed[l];
    }
  }
  r.p_exposure_combined = quantile_combine(r.p_exposure, gamma);
  r.p_outcome_combined = quantile_combine(r.p_outcome, gamma);
  r.p_value = std::max(r.p_exposure_combined, r.p_outcome_combined);
  r.reject = r.p_value <= alpha;
  return r;
}

inline std::vector<SplitAnalysis> analyze_splits(const Matrix& x, int count, const LoganSettings& settings,
                                                 std::span<const Node> qs) {
  if (count < 1) throw std::invalid_argument("multi-split: need at least one split");
  std::vector<SplitAnalysis> out(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) out[static_cast<std::size_t>(s)] = analyze_split(x, s, settings, qs);
  return out;
}

inline MultiSplitReport test_mediator_multisplit(const Dataset& data, Node q, double alpha, int splits, double gamma,
                                                 const LoganSettings& settings) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const std::vector<Node> qs{q};
  const auto analyses = analyze_splits(centered_values(data), splits, settings, qs);
  return combine_splits(analyses, q, alpha, gamma);
}

// ---------------------------------------------------------------------------
// FDR selection

/// Per-half p-values for every mediator (index q-1).
struct PValueTable {
  std::array<Vector, 2> p_exposure;
  std::array<Vector, 2> p_outcome;
};

inline PValueTable p_value_table(const SplitAnalysis& a, int d) {
  PValueTable t;
  for (int l = 0; l < 2; ++l) {
    t.p_exposure[l] = Vector::Ones(d);
    t.p_outcome[l] = Vector::Ones(d);
  }
  for (Node q = 1; q <= d; ++q) {
    const MediationReport r = mediator_report(a, q, 0.05);
    for (int l = 0; l < 2; ++l) {
      t.p_exposure[l](q - 1) = r.sub[l][0].p_value;
      t.p_outcome[l](q - 1) = r.sub[l][1].p_value;
    }
  }
  return t;
}

/// ScreenMin: largest c in {alpha/d, ..., alpha/2, alpha} with c |{q : p_min(q) <= c}| <= alpha.
inline double screen_threshold(const Vector& p_min, double alpha) {
  const auto d = static_cast<int>(p_min.size());
  double best = alpha / std::max(d, 1);
  for (int k = d; k >= 1; --k) {
    const double c = alpha / k;
    const auto count = (p_min.array() <= c).count();
    if (c * static_cast<double>(count) <= alpha) best = std::max(best, c);
  }
  return best;
}

/// BY step-up on p over the candidate set: indices of the selected entries.
inline std::vector<int> by_select(const Vector& p, const std::vector<int>& candidates, double alpha) {
  const auto size = static_cast<int>(candidates.size());
  if (size == 0) return {};
  double harmonic = 0.0;
  for (int j = 1; j <= size; ++j) harmonic += 1.0 / j;
  std::vector<int> order = candidates;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p(a) < p(b); });
  int h = 0;
  for (int i = 1; i <= size; ++i)
    if (p(order[static_cast<std::size_t>(i - 1)]) <= i * alpha / (2.0 * size * harmonic)) h = i;
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

struct FdrHalf {
  double screen = 1.0;            // c; equal to 1 when screening is bypassed
  std::vector<Node> screened;     // H0
  int cutoff = 0;                 // h
  std::vector<Node> selected;     // H
};

struct FdrReport {
  double alpha = 0.05;
  bool screening = true;
  std::array<FdrHalf, 2> halves;
  std::vector<Node> selected;  // union over halves
};

/// Selection from per-half p-values. screening = false gives the BY baseline.
inline FdrReport fdr_from_pvalues(const PValueTable& t, double alpha, bool screening = true) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  FdrReport r;
  r.alpha = alpha;
  r.screening = screening;
  std::vector<Node> all;
  for (int l = 0; l < 2; ++l) {
    const Vector p_min = t.p_exposure[l].cwiseMin(t.p_outcome[l]);
    const Vector p_max = t.p_exposure[l].cwiseMax(t.p_outcome[l]);
    FdrHalf& h = r.halves[l];
    std::vector<int> candidates;
    if (screening) {
      h.screen = screen_threshold(p_min, alpha);
      for (Eigen::Index k = 0; k < p_min.size(); ++k)
        if (p_min(k) <= h.screen) candidates.push_back(static_cast<int>(k));
    } else {
      for (Eigen::Index k = 0; k < p_min.size(); ++k) candidates.push_back(static_cast<int>(k));
    }
    for (int k : candidates) h.screened.push_back(k + 1);
    const auto sel = by_select(p_max, candidates, alpha);
    h.cutoff = static_cast<int>(sel.size());
    for (int k : sel) h.selected.push_back(k + 1);
    all.insert(all.end(), h.selected.begin(), h.selected.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  r.selected = std::move(all);
  return r;
}

inline PValueTable compute_p_values(const Dataset& data, const LoganSettings& settings) {
  const auto qs = all_mediators(data.mediators());
  return p_value_table(analyze_split(centered_values(data), 0, settings, qs), data.mediators());
}

inline FdrReport fdr_select(const Dataset& data, double alpha, const LoganSettings& settings) {
  return fdr_from_pvalues(compute_p_values(data, settings), alpha, true);
}

inline FdrReport by_baseline(const Dataset& data, double alpha, const LoganSettings& settings) {
  return fdr_from_pvalues(compute_p_values(data, settings), alpha, false);
}

}  // namespace logan
