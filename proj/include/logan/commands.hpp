#pragma once

/**
 * @file commands.hpp
 * @brief The simulate, test, fdr and bench commands behind the logan tool.
 *
 * Each command takes a resolved config, writes its files and returns an exit
 * code. Failures are reported by exception and mapped to exit codes by
 * exit_code_for(). Output files are written once, after all work finished.
 */

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "logan/dataset.hpp"
#include "logan/mediate.hpp"
#include "logan/parallel.hpp"
#include "logan/report.hpp"
#include "logan/sem.hpp"

namespace logan::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kUsage;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const ModelError*>(&e)) return kData;
  if (dynamic_cast<const NumericalError*>(&e)) return kNumerical;
  if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e)) return kUsage;
  return kData;
}

// ---------------------------------------------------------------------------
// Shared options

/// Options common to the inference commands.
struct InferenceOptions {
  double alpha = 0.05;
  int m = 2000;
  std::optional<double> lambda;  // empty: kappa sqrt(log n / n)
  double kappa = 0.5;
  double threshold_c0 = 1e-3;
  std::string penalty = "mcp";
  std::optional<double> penalty_lambda;  // empty: BIC grid
  int multisplit = 1;
  double gamma = 0.15;
  std::uint64_t seed = 0;
};

inline void validate(const InferenceOptions& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (o.m < 100) throw UsageError("--m must be at least 100");
  if (o.lambda && !(*o.lambda >= 0.0)) throw UsageError("--lambda must be 'auto' or nonnegative");
  if (!(o.kappa > 0.0)) throw UsageError("--kappa must be positive");
  if (!(o.threshold_c0 >= 0.0)) throw UsageError("--threshold-c0 must be nonnegative");
  if (o.penalty != "mcp" && o.penalty != "lasso") throw UsageError("--penalty must be mcp or lasso");
  if (o.penalty_lambda && !(*o.penalty_lambda >= 0.0)) throw UsageError("--penalty-lambda must be nonnegative");
  if (o.multisplit < 1) throw UsageError("--multisplit must be at least 1");
  if (!(o.gamma > 0.0 && o.gamma < 1.0)) throw UsageError("--gamma must lie in (0, 1)");
}

inline LoganSettings make_settings(const InferenceOptions& o) {
  LoganSettings s;
  s.notears.threshold_c0 = o.threshold_c0;
  s.auto_lambda = !o.lambda.has_value();
  if (o.lambda) s.notears.lambda = *o.lambda;
  s.kappa = o.kappa;
  s.m = o.m;
  s.seed = o.seed;
  s.default_kind = o.penalty == "lasso" ? Penalty::Lasso : Penalty::Mcp;
  if (o.penalty_lambda) {
    PenaltySpec p;
    p.kind = s.default_kind;
    p.tuning = Tuning::Fixed;
    p.lambda = *o.penalty_lambda;
    s.penalty = p;
  }
  return s;
}

inline json to_json(const InferenceOptions& o) {
  return {{"alpha", o.alpha},
          {"m", o.m},
          {"lambda", o.lambda ? json(*o.lambda) : json("auto")},
          {"kappa", o.kappa},
          {"threshold_c0", o.threshold_c0},
          {"penalty", o.penalty},
          {"penalty_lambda", o.penalty_lambda ? json(*o.penalty_lambda) : json("bic")},
          {"multisplit", o.multisplit},
          {"gamma", o.gamma},
          {"seed", o.seed}};
}

// ---------------------------------------------------------------------------
// Files

inline void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw DataError("cannot create directory '" + parent.string() + "': " + ec.message());
}

inline void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline RoleMap read_roles(const std::optional<std::string>& sidecar, const RoleMap& flags) {
  RoleMap roles = flags;
  if (!sidecar) return roles;
  std::ifstream in(*sidecar);
  if (!in) throw DataError("cannot open role map '" + *sidecar + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(*sidecar + ": " + e.what());
  }
  auto take = [&](const char* key, std::optional<std::string>& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) throw DataError(*sidecar + ": '" + key + "' must name exactly one column");
    const auto name = j[key].get<std::string>();
    if (slot && *slot != name) throw UsageError(std::string("--") + key + " conflicts with the role map file");
    slot = name;
  };
  take("exposure", roles.exposure);
  take("outcome", roles.outcome);
  return roles;
}

inline json dataset_json(const std::string& path, const Dataset& data) {
  return {{"path", path}, {"n", data.rows()}, {"d", data.mediators()}, {"columns", data.names}};
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateConfig {
  std::optional<std::string> scenario;
  int d = 50;
  double p1 = 0.05;
  double p2 = 0.15;
  std::optional<int> n;
  std::uint64_t seed = 0;
  std::string out = ".";
};

/// Scenario parameters after applying a preset; explicit n wins over the preset's.
inline ScenarioConfig resolve_scenario(const SimulateConfig& c) {
  ScenarioConfig s;
  if (c.scenario) {
    const ScenarioPreset& p = find_preset(*c.scenario);
    s.d = p.d;
    s.p1 = p.p1;
    s.p2 = p.p2;
    s.n = p.n_large;
  } else {
    s.d = c.d;
    s.p1 = c.p1;
    s.p2 = c.p2;
  }
  if (c.n) s.n = *c.n;
  s.seed = derive_seed(c.seed, {stream::model});
  validate(s);
  return s;
}

inline std::string delta_csv(const SemModel& model, const std::vector<std::string>& names) {
  const Vector delta = mediation_strength(model);
  std::string out = "q,name,delta\n";
  for (int q = 1; q <= model.mediators(); ++q)
    out += std::to_string(q) + "," + names[static_cast<std::size_t>(q)] + "," + format_double(delta(q - 1)) + "\n";
  return out;
}

/// Writes data.csv, model.json and delta.csv into c.out.
inline int run_simulate(const SimulateConfig& c, std::ostream& log) {
  ScenarioConfig s;
  try {
    s = resolve_scenario(c);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SemModel model = generate_scenario(s);
  const Dataset data = sample(model, s.n, derive_seed(c.seed, {stream::data}));

  std::ostringstream csv;
  write_csv(csv, data);
  json model_json = to_json(model);
  json config = {{"command", "simulate"}, {"version", kVersion},
                 {"scenario", c.scenario ? json(*c.scenario) : json(nullptr)},
                 {"d", s.d}, {"p1", s.p1}, {"p2", s.p2}, {"n", s.n}, {"seed", c.seed}};
  json doc = {{"config", config}, {"model", model_json}};

  const auto data_path = join_path(c.out, "data.csv");
  const auto model_path = join_path(c.out, "model.json");
  const auto delta_path = join_path(c.out, "delta.csv");
  write_text(data_path, csv.str());
  write_text(model_path, dump(doc));
  write_text(delta_path, delta_csv(model, data.names));
  log << "wrote " << data_path << " (" << data.rows() << " x " << data.dim() << "), " << model_path << ", "
      << delta_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// test

struct TestConfig {
  std::string data;
  RoleMap roles;
  std::optional<std::string> roles_file;
  std::vector<std::string> mediators;  // indices 1..d or column names
  bool all = false;
  InferenceOptions options;
  std::string report = "report.json";
};

inline std::vector<Node> resolve_mediators(const Dataset& data, const std::vector<std::string>& tokens, bool all) {
  if (all) return all_mediators(data.mediators());
  if (tokens.empty()) throw UsageError("give --q or --all");
  std::vector<Node> qs;
  for (const auto& t : tokens) {
    Node q = -1;
    for (int j = 1; j <= data.mediators(); ++j)
      if (data.names[static_cast<std::size_t>(j)] == t) q = j;
    if (q < 0) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc{} || ptr != t.data() + t.size())
        throw UsageError("mediator '" + t + "' is neither a mediator column nor an index");
      if (v < 1 || v > data.mediators())
        throw UsageError("mediator index " + t + " out of range 1.." + std::to_string(data.mediators()));
      q = v;
    }
    if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
  }
  return qs;
}

inline std::string fmt(double v, int precision = 4) {
  if (!std::isfinite(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

inline bool all_halves_failed(std::span<const SplitAnalysis> splits) {
  for (const auto& a : splits)
    for (const auto& h : a.halves)
      if (!h.failed) return false;
  return true;
}

inline int run_test(const TestConfig& c, std::ostream& out) {
  validate(c.options);
  const Dataset data = read_csv_file(c.data, read_roles(c.roles_file, c.roles));
  const auto qs = resolve_mediators(data, c.mediators, c.all);
  const LoganSettings settings = make_settings(c.options);
  const auto analyses = analyze_splits(centered_values(data), c.options.multisplit, settings, qs);

  json results = json::array();
  out << std::left << std::setw(6) << "q" << std::setw(16) << "mediator";
  if (c.options.multisplit == 1) {
    out << std::setw(12) << "p(half 1)" << std::setw(12) << "p(half 2)" << "reject\n";
    for (Node q : qs) {
      const MediationReport r = mediator_report(analyses[0], q, c.options.alpha);
      json j = to_json(r);
      j["name"] = data.names[static_cast<std::size_t>(q)];
      results.push_back(std::move(j));
      // union-intersection p-value of each half
      const double p1 = std::max(r.sub[0][0].p_value, r.sub[0][1].p_value);
      const double p2 = std::max(r.sub[1][0].p_value, r.sub[1][1].p_value);
      out << std::setw(6) << q << std::setw(16) << data.names[static_cast<std::size_t>(q)] << std::setw(12)
          << fmt(p1) << std::setw(12) << fmt(p2) << (r.reject ? "yes" : "no") << "\n";
    }
  } else {
    out << std::setw(12) << "p(E->q)" << std::setw(12) << "p(q->Y)" << std::setw(12) << "p" << "reject\n";
    for (Node q : qs) {
      const MultiSplitReport r = combine_splits(analyses, q, c.options.alpha, c.options.gamma);
      json j = to_json(r);
      j["name"] = data.names[static_cast<std::size_t>(q)];
      results.push_back(std::move(j));
      out << std::setw(6) << q << std::setw(16) << data.names[static_cast<std::size_t>(q)] << std::setw(12)
          << fmt(r.p_exposure_combined) << std::setw(12) << fmt(r.p_outcome_combined) << std::setw(12)
          << fmt(r.p_value) << (r.reject ? "yes" : "no") << "\n";
    }
  }
  out << std::right;

  json diag = json::array();
  for (const auto& a : analyses) diag.push_back(diagnostics(a));
  json config = {{"command", "test"}, {"version", kVersion}, {"options", to_json(c.options)},
                 {"settings", to_json(settings)}, {"mediators", qs}};
  json doc = {{"config", config},
              {"dataset", dataset_json(c.data, data)},
              {"method", c.options.multisplit == 1 ? "single-split" : "multi-split"},
              {"results", results},
              {"diagnostics", diag}};
  write_text(c.report, dump(doc));
  for (const auto& a : analyses)
    for (const auto& h : a.halves)
      if (h.failed) out << "warning: split " << a.split_index << " half " << h.half << ": " << h.failure << "\n";
  return all_halves_failed(analyses) ? kNumerical : kOk;
}

// ---------------------------------------------------------------------------
// fdr

struct FdrConfig {
  std::string data;
  RoleMap roles;
  std::optional<std::string> roles_file;
  InferenceOptions options;
  bool baseline_by = false;
  std::string report = "fdr.json";
};

inline int run_fdr(const FdrConfig& c, std::ostream& out) {
  validate(c.options);
  if (c.options.multisplit != 1) throw UsageError("fdr runs on a single split; --multisplit is not supported");
  const Dataset data = read_csv_file(c.data, read_roles(c.roles_file, c.roles));
  const LoganSettings settings = make_settings(c.options);
  const int d = data.mediators();
  const auto qs = all_mediators(d);
  const SplitAnalysis a = analyze_split(centered_values(data), 0, settings, qs);
  const PValueTable table = p_value_table(a, d);

  const FdrReport logan = fdr_from_pvalues(table, c.options.alpha, true);
  json p_values = json::array();
  for (int q = 1; q <= d; ++q) {
    json halves = json::array();
    for (int l = 0; l < 2; ++l) halves.push_back({table.p_exposure[l](q - 1), table.p_outcome[l](q - 1)});
    p_values.push_back({{"q", q}, {"name", data.names[static_cast<std::size_t>(q)]}, {"p", halves}});
  }
  json config = {{"command", "fdr"}, {"version", kVersion}, {"options", to_json(c.options)},
                 {"settings", to_json(settings)}, {"baseline", c.baseline_by ? "by" : "none"}};
  json doc = {{"config", config}, {"dataset", dataset_json(c.data, data)}, {"logan", to_json(logan, data.names)}};

  auto print = [&](const char* label, const FdrReport& r) {
    out << label << " at alpha " << c.options.alpha << ": " << r.selected.size() << " selected\n";
    for (Node q : r.selected) out << "  " << std::setw(4) << q << "  " << data.names[static_cast<std::size_t>(q)] << "\n";
  };
  print("LOGAN", logan);
  if (c.baseline_by) {
    const FdrReport by = fdr_from_pvalues(table, c.options.alpha, false);
    doc["by"] = to_json(by, data.names);
    print("BY", by);
  }
  doc["p_values"] = p_values;
  doc["diagnostics"] = diagnostics(a);
  write_text(c.report, dump(doc));
  for (const auto& h : a.halves)
    if (h.failed) out << "warning: half " << h.half << ": " << h.failure << "\n";
  return a.halves[0].failed && a.halves[1].failed ? kNumerical : kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchConfig {
  std::optional<std::string> scenario = "A";
  int d = 50;
  double p1 = 0.05;
  double p2 = 0.15;
  std::vector<int> ns{100, 200};
  int reps = 100;
  std::vector<double> alphas{0.01, 0.025, 0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  std::vector<double> fdr_levels{0.05, 0.1, 0.2, 0.4};
  InferenceOptions options;  // options.alpha is the headline level
  std::string out = "bench";
};

enum class Method { Single, MultiSplit };

inline const char* method_name(Method m) { return m == Method::Single ? "single" : "multisplit"; }

struct ReplicationRecord {
  int n = 0;
  int rep = 0;
  bool ok = false;
  std::string error;
  double sigma2 = 0.0;
  int failed_halves = 0;
  std::vector<MediationReport> single;  // split 0, index q-1
  std::vector<double> multi_p;          // combined p-values, empty for one split
  PValueTable p_values;                 // split 0
};

struct FdrPoint {
  double fdr = 0.0;
  double tpr = 0.0;
  double mean_selected = 0.0;
  int replications = 0;
};

struct BenchResult {
  BenchConfig config;
  ScenarioConfig scenario;
  SemModel model;
  Vector delta;
  std::vector<std::vector<ReplicationRecord>> records;  // [n index][rep]

  int mediators() const { return model.mediators(); }

  int successes(std::size_t ni) const {
    int k = 0;
    for (const auto& r : records[ni]) k += r.ok;
    return k;
  }

  bool rejects(const ReplicationRecord& r, Node q, Method m, double alpha) const {
    if (m == Method::Single) return r.single[static_cast<std::size_t>(q - 1)].rejects_at(alpha);
    return r.multi_p[static_cast<std::size_t>(q - 1)] <= alpha;
  }

  int rejections(std::size_t ni, Node q, Method m, double alpha) const {
    int k = 0;
    for (const auto& r : records[ni])
      if (r.ok) k += rejects(r, q, m, alpha);
    return k;
  }

  double rejection_rate(std::size_t ni, Node q, Method m, double alpha) const {
    const int s = successes(ni);
    return s == 0 ? 0.0 : static_cast<double>(rejections(ni, q, m, alpha)) / s;
  }

  /// Mean rejection rate over mediators with delta = 0 (null) or delta > 0.
  double mean_rate(std::size_t ni, bool null, Method m, double alpha) const {
    double sum = 0.0;
    int count = 0;
    for (Node q = 1; q <= mediators(); ++q) {
      if ((delta(q - 1) == 0.0) != null) continue;
      sum += rejection_rate(ni, q, m, alpha);
      ++count;
    }
    return count == 0 ? 0.0 : sum / count;
  }

  FdrPoint fdr(std::size_t ni, bool screening, double alpha) const {
    FdrPoint pt;
    int positives = 0;
    for (Node q = 1; q <= mediators(); ++q) positives += delta(q - 1) != 0.0;
    for (const auto& r : records[ni]) {
      if (!r.ok) continue;
      const FdrReport f = fdr_from_pvalues(r.p_values, alpha, screening);
      int false_sel = 0;
      int true_sel = 0;
      for (Node q : f.selected) (delta(q - 1) == 0.0 ? false_sel : true_sel)++;
      const int sel = static_cast<int>(f.selected.size());
      pt.fdr += sel == 0 ? 0.0 : static_cast<double>(false_sel) / sel;
      pt.tpr += positives == 0 ? 0.0 : static_cast<double>(true_sel) / positives;
      pt.mean_selected += sel;
      ++pt.replications;
    }
    if (pt.replications > 0) {
      pt.fdr /= pt.replications;
      pt.tpr /= pt.replications;
      pt.mean_selected /= pt.replications;
    }
    return pt;
  }
};

inline ScenarioConfig resolve_scenario(const BenchConfig& c) {
  SimulateConfig s;
  s.scenario = c.scenario;
  s.d = c.d;
  s.p1 = c.p1;
  s.p2 = c.p2;
  s.seed = c.options.seed;
  return resolve_scenario(s);
}

inline void validate(const BenchConfig& c) {
  validate(c.options);
  if (c.ns.empty()) throw UsageError("--n needs at least one sample size");
  for (int n : c.ns)
    if (n < 8) throw UsageError("sample sizes must be at least 8");
  if (c.reps < 1) throw UsageError("--reps must be at least 1");
  for (double a : c.alphas)
    if (!(a > 0.0 && a < 1.0)) throw UsageError("alpha grid values must lie in (0, 1)");
  for (double a : c.fdr_levels)
    if (!(a > 0.0 && a < 1.0)) throw UsageError("FDR levels must lie in (0, 1)");
}

inline ReplicationRecord run_replication(const BenchConfig& c, const SemModel& model, int n, int rep) {
  ReplicationRecord r;
  r.n = n;
  r.rep = rep;
  const auto un = static_cast<std::uint64_t>(n);
  const auto ur = static_cast<std::uint64_t>(rep);
  try {
    const Dataset data = sample(model, n, derive_seed(c.options.seed, {stream::data, un, ur}));
    LoganSettings settings = make_settings(c.options);
    settings.seed = derive_seed(c.options.seed, {stream::replication, un, ur});
    const int d = model.mediators();
    const auto qs = all_mediators(d);
    const auto analyses = analyze_splits(centered_values(data), c.options.multisplit, settings, qs);
    for (const auto& a : analyses)
      for (const auto& h : a.halves) r.failed_halves += h.failed;
    r.sigma2 = analyses[0].sigma2.value;
    for (Node q : qs) r.single.push_back(mediator_report(analyses[0], q, c.options.alpha));
    if (c.options.multisplit > 1)
      for (Node q : qs) r.multi_p.push_back(combine_splits(analyses, q, c.options.alpha, c.options.gamma).p_value);
    r.p_values = p_value_table(analyses[0], d);
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

/// Replications fan out over workers; each writes only its own slot.
inline BenchResult run_bench(const BenchConfig& c) {
  validate(c);
  BenchResult res;
  res.config = c;
  try {
    res.scenario = resolve_scenario(c);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  res.model = generate_scenario(res.scenario);
  res.delta = mediation_strength(res.model);
  res.records.assign(c.ns.size(), std::vector<ReplicationRecord>(static_cast<std::size_t>(c.reps)));
  const std::size_t total = c.ns.size() * static_cast<std::size_t>(c.reps);
  parallel_for(total, [&](std::size_t t) {
    const std::size_t ni = t / static_cast<std::size_t>(c.reps);
    const int rep = static_cast<int>(t % static_cast<std::size_t>(c.reps));
    res.records[ni][static_cast<std::size_t>(rep)] = run_replication(c, res.model, c.ns[ni], rep);
  });
  return res;
}

inline std::vector<double> alpha_grid(const BenchConfig& c) {
  std::set<double> g(c.alphas.begin(), c.alphas.end());
  g.insert(c.options.alpha);
  return {g.begin(), g.end()};
}

inline std::vector<Method> methods(const BenchConfig& c) {
  if (c.options.multisplit > 1) return {Method::Single, Method::MultiSplit};
  return {Method::Single};
}

/// Writes rejection.csv, roc.csv, fdr.csv, replications.csv and bench.json into c.out.
inline void write_bench(const BenchResult& res) {
  const BenchConfig& c = res.config;
  const auto grid = alpha_grid(c);
  const int d = res.mediators();
  const auto names = default_column_names(res.model.dim());

  std::string rej = "n,q,name,delta,method,alpha,rejections,replications,rate\n";
  std::string roc = "n,method,alpha,fpr,tpr\n";
  std::string fdr = "n,method,alpha,fdr,tpr,mean_selected,replications\n";
  std::string reps = "n,rep,status,sigma2,failed_halves,error\n";
  json summary = json::array();
  for (std::size_t ni = 0; ni < c.ns.size(); ++ni) {
    const std::string n = std::to_string(c.ns[ni]);
    const std::string ok = std::to_string(res.successes(ni));
    for (Method m : methods(c)) {
      for (Node q = 1; q <= d; ++q)
        for (double a : grid)
          rej += n + "," + std::to_string(q) + "," + names[static_cast<std::size_t>(q)] + "," +
                 format_double(res.delta(q - 1)) + "," + method_name(m) + "," + format_double(a) + "," +
                 std::to_string(res.rejections(ni, q, m, a)) + "," + ok + "," +
                 format_double(res.rejection_rate(ni, q, m, a)) + "\n";
      for (double a : grid)
        roc += n + "," + method_name(m) + "," + format_double(a) + "," +
               format_double(res.mean_rate(ni, true, m, a)) + "," + format_double(res.mean_rate(ni, false, m, a)) +
               "\n";
      double worst = 0.0;
      for (Node q = 1; q <= d; ++q)
        if (res.delta(q - 1) == 0.0) worst = std::max(worst, res.rejection_rate(ni, q, m, c.options.alpha));
      summary.push_back({{"n", c.ns[ni]},
                         {"method", method_name(m)},
                         {"alpha", c.options.alpha},
                         {"mean_null_rate", res.mean_rate(ni, true, m, c.options.alpha)},
                         {"max_null_rate", worst},
                         {"mean_power", res.mean_rate(ni, false, m, c.options.alpha)},
                         {"replications", res.successes(ni)}});
    }
    for (int screening = 1; screening >= 0; --screening)
      for (double a : c.fdr_levels) {
        const FdrPoint p = res.fdr(ni, screening == 1, a);
        fdr += n + "," + (screening ? "logan" : "by") + "," + format_double(a) + "," + format_double(p.fdr) + "," +
               format_double(p.tpr) + "," + format_double(p.mean_selected) + "," + std::to_string(p.replications) +
               "\n";
      }
    for (const auto& r : res.records[ni]) {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      reps += n + "," + std::to_string(r.rep) + "," + (r.ok ? "ok" : "error") + "," + format_double(r.sigma2) + "," +
              std::to_string(r.failed_halves) + "," + err + "\n";
    }
  }

  json mediators = json::array();
  for (Node q = 1; q <= d; ++q)
    if (res.delta(q - 1) != 0.0) mediators.push_back({{"q", q}, {"delta", res.delta(q - 1)}});
  json config = {{"command", "bench"},
                 {"version", kVersion},
                 {"scenario", c.scenario ? json(*c.scenario) : json(nullptr)},
                 {"d", res.scenario.d},
                 {"p1", res.scenario.p1},
                 {"p2", res.scenario.p2},
                 {"n", c.ns},
                 {"reps", c.reps},
                 {"alphas", grid},
                 {"fdr_levels", c.fdr_levels},
                 {"options", to_json(c.options)},
                 {"settings", to_json(make_settings(c.options))}};
  json doc = {{"config", config}, {"nonzero_mediators", mediators}, {"summary", summary}};

  write_text(join_path(c.out, "rejection.csv"), rej);
  write_text(join_path(c.out, "roc.csv"), roc);
  write_text(join_path(c.out, "fdr.csv"), fdr);
  write_text(join_path(c.out, "replications.csv"), reps);
  write_text(join_path(c.out, "bench.json"), dump(doc));
}

inline int run_bench_command(const BenchConfig& c, std::ostream& out) {
  const BenchResult res = run_bench(c);
  write_bench(res);
  out << "scenario d=" << res.scenario.d << ", " << res.delta.size() - (res.delta.array() == 0.0).count()
      << " mediators with delta > 0\n";
  for (std::size_t ni = 0; ni < c.ns.size(); ++ni)
    for (Method m : methods(c))
      out << "n=" << c.ns[ni] << " " << method_name(m) << ": size " << fmt(res.mean_rate(ni, true, m, c.options.alpha))
          << ", power " << fmt(res.mean_rate(ni, false, m, c.options.alpha)) << " at alpha " << c.options.alpha
          << " over " << res.successes(ni) << " replications\n";
  out << "wrote " << c.out << "/{rejection,roc,fdr,replications}.csv and bench.json\n";
  return kOk;
}

}  // namespace logan::cli
