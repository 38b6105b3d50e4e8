#pragma once

/**
 * @file report.hpp
 * @brief JSON views of settings and test results.
 *
 * Infinite critical values (empty edge sets) are written as null.
 */

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "logan/mediate.hpp"

namespace logan {

using json = nlohmann::ordered_json;

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string penalty_name(Penalty p) { return p == Penalty::Lasso ? "lasso" : "mcp"; }

inline json to_json(const NotearsSettings& s) {
  return {{"lambda", s.lambda},         {"threshold_c0", s.threshold_c0}, {"rho_init", s.rho_init},
          {"rho_max", s.rho_max},       {"alpha_init", s.alpha_init},     {"h_tol", s.h_tol},
          {"max_outer", s.max_outer},   {"max_inner", s.max_inner},       {"progress_ratio", s.progress_ratio},
          {"inner_tol", s.inner_tol},   {"inner_ftol", s.inner_ftol}};
}

inline json to_json(const PenaltySpec& p) {
  json j = {{"kind", penalty_name(p.kind)}, {"gamma", p.gamma}};
  if (p.tuning == Tuning::BicGrid) {
    j["tuning"] = "bic";
    j["grid"] = p.grid;
  } else {
    j["tuning"] = "fixed";
    j["lambda"] = p.lambda;
  }
  return j;
}

inline json to_json(const LoganSettings& s) {
  json j = {{"notears", to_json(s.notears)}, {"auto_lambda", s.auto_lambda}, {"kappa", s.kappa}};
  j["penalty"] = s.penalty ? to_json(*s.penalty)
                          : json{{"kind", penalty_name(s.default_kind)}, {"tuning", "bic"}, {"grid", "per sample size"}};
  j["m"] = s.m;
  j["seed"] = s.seed;
  return j;
}

inline json to_json(const SubTest& t) {
  return {{"from", t.q1},        {"to", t.q2},       {"edges", t.s_size},
          {"statistic", t.statistic}, {"critical_value", finite_or_null(t.c_hat)},
          {"exceed", t.exceed},  {"m", t.m},         {"p_value", t.p_value}, {"reject", t.reject}};
}

inline json to_json(const MediationReport& r) {
  json halves = json::array();
  for (int l = 0; l < 2; ++l) {
    halves.push_back({{"half", l + 1},
                      {"failed", r.half_failed[l]},
                      {"degenerate_edges", r.degenerate_edges[l]},
                      {"exposure_to_mediator", to_json(r.sub[l][0])},
                      {"mediator_to_outcome", to_json(r.sub[l][1])},
                      {"reject", r.half_reject[l]}});
  }
  return {{"q", r.q}, {"alpha", r.alpha}, {"sigma2", r.sigma2}, {"halves", halves}, {"reject", r.reject}};
}

inline json to_json(const MultiSplitReport& r) {
  return {{"q", r.q},
          {"alpha", r.alpha},
          {"gamma", r.gamma},
          {"splits", r.splits},
          {"p_exposure", r.p_exposure},
          {"p_outcome", r.p_outcome},
          {"p_exposure_combined", r.p_exposure_combined},
          {"p_outcome_combined", r.p_outcome_combined},
          {"p_value", r.p_value},
          {"failed_halves", r.failed_halves},
          {"reject", r.reject}};
}

inline json to_json(const FdrReport& r, const std::vector<std::string>& names) {
  auto labelled = [&](const std::vector<Node>& qs) {
    json a = json::array();
    for (Node q : qs) a.push_back({{"q", q}, {"name", names.at(static_cast<std::size_t>(q))}});
    return a;
  };
  json halves = json::array();
  for (int l = 0; l < 2; ++l) {
    const FdrHalf& h = r.halves[l];
    halves.push_back({{"half", l + 1},
                      {"screen_threshold", h.screen},
                      {"screened", h.screened},
                      {"cutoff", h.cutoff},
                      {"selected", labelled(h.selected)}});
  }
  return {{"alpha", r.alpha},
          {"method", r.screening ? "logan" : "by"},
          {"halves", halves},
          {"selected", labelled(r.selected)}};
}

/// Per-half diagnostics of one split.
inline json diagnostics(const SplitAnalysis& a) {
  json halves = json::array();
  for (const HalfAnalysis& h : a.halves) {
    json j = {{"half", h.half}, {"n_fit", h.n_fit}, {"n_eval", h.n_eval}, {"failed", h.failed}};
    if (h.failed) {
      j["failure"] = h.failure;
    } else {
      const NotearsFit& f = h.fit.notears;
      j["notears"] = {{"edges", static_cast<int>((h.fit.b_hat.array() != 0.0).count())},
                      {"h_raw", f.h_raw},
                      {"rho", f.rho},
                      {"outer_iterations", f.outer_iterations},
                      {"inner_iterations", f.inner_iterations},
                      {"removed_cycle_edges", f.removed_cycle_edges}};
      j["tested_edges"] = static_cast<int>(h.decorrelated.edges.size());
      json degenerate = json::array();
      for (const auto& [i, k] : h.decorrelated.degenerate) degenerate.push_back({i, k});
      j["degenerate_edges"] = degenerate;
    }
    halves.push_back(std::move(j));
  }
  return {{"split", a.split_index}, {"sigma2", a.sigma2.value}, {"halves", halves}};
}

}  // namespace logan
