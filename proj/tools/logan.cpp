// logan: simulate data, test mediators, select mediators with FDR control,
// and run replication benchmarks.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "logan/commands.hpp"

namespace {

using namespace logan;
using namespace logan::cli;

void add_inference_flags(CLI::App* app, InferenceOptions& o, std::string& lambda) {
  app->add_option("--alpha", o.alpha, "Significance or FDR level")->capture_default_str();
  app->add_option("--m", o.m, "Bootstrap draws")->capture_default_str();
  app->add_option("--lambda", lambda, "NOTEARS L1 weight, or 'auto' for kappa*sqrt(log n / n)")->capture_default_str();
  app->add_option("--kappa", o.kappa, "Constant of the automatic lambda")->capture_default_str();
  app->add_option("--threshold-c0", o.threshold_c0, "Hard threshold applied to the NOTEARS fit")->capture_default_str();
  app->add_option("--penalty", o.penalty, "Refit and nuisance penalty: mcp or lasso")->capture_default_str();
  app->add_option("--penalty-lambda", o.penalty_lambda, "Fixed penalty level (default: BIC over a grid)");
  app->add_option("--multisplit", o.multisplit, "Number of random splits S")->capture_default_str();
  app->add_option("--gamma", o.gamma, "Quantile level for combining split p-values")->capture_default_str();
  app->add_option("--seed", o.seed, "Base seed")->capture_default_str();
}

void resolve_lambda(InferenceOptions& o, const std::string& lambda) {
  if (lambda == "auto") return;
  try {
    std::size_t used = 0;
    o.lambda = std::stod(lambda, &used);
    if (used != lambda.size()) throw std::invalid_argument(lambda);
  } catch (const std::exception&) {
    throw UsageError("--lambda must be 'auto' or a number, got '" + lambda + "'");
  }
}

void add_role_flags(CLI::App* app, RoleMap& roles, std::optional<std::string>& file) {
  app->add_option("--exposure", roles.exposure, "Exposure column (default: first)");
  app->add_option("--outcome", roles.outcome, "Outcome column (default: last)");
  app->add_option("--roles", file, "JSON file with \"exposure\" and \"outcome\" column names")
      ->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOGAN: testing individual mediation effects in Gaussian DAG models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a scenario model and a dataset");
  simulate->add_option("--scenario", sim.scenario, "Preset: A, B (= B-body), B-appendix or C");
  auto* sim_d = simulate->add_option("--d", sim.d, "Number of mediators")->capture_default_str();
  auto* sim_p1 = simulate->add_option("--p1", sim.p1, "Edge probability at the exposure and outcome")->capture_default_str();
  auto* sim_p2 = simulate->add_option("--p2", sim.p2, "Edge probability among mediators")->capture_default_str();
  simulate->add_option("--n", sim.n, "Sample size (default: the preset's larger n, else 200)");
  simulate->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  sim_d->excludes("--scenario");
  sim_p1->excludes("--scenario");
  sim_p2->excludes("--scenario");

  TestConfig test;
  std::string test_lambda = "auto";
  auto* test_cmd = app.add_subcommand("test", "Test H0(q): no mediation through q");
  test_cmd->add_option("--data", test.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  add_role_flags(test_cmd, test.roles, test.roles_file);
  auto* q_opt = test_cmd->add_option("--q", test.mediators, "Mediator index (1..d) or column name; repeatable");
  auto* all_opt = test_cmd->add_flag("--all", test.all, "Test every mediator");
  q_opt->excludes(all_opt);
  test_cmd->add_option("--report", test.report, "Report JSON path")->capture_default_str();
  add_inference_flags(test_cmd, test.options, test_lambda);

  FdrConfig fdr;
  std::string fdr_lambda = "auto";
  std::string baseline = "none";
  fdr.options.alpha = 0.1;
  auto* fdr_cmd = app.add_subcommand("fdr", "Select mediators with FDR control (ScreenMin + BY)");
  fdr_cmd->add_option("--data", fdr.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  add_role_flags(fdr_cmd, fdr.roles, fdr.roles_file);
  fdr_cmd->add_option("--baseline", baseline, "Comparator: none or by")
      ->check(CLI::IsMember({"none", "by"}))
      ->capture_default_str();
  fdr_cmd->add_option("--report", fdr.report, "Report JSON path")->capture_default_str();
  add_inference_flags(fdr_cmd, fdr.options, fdr_lambda);

  BenchConfig bench;
  std::string bench_lambda = "auto";
  auto* bench_cmd = app.add_subcommand("bench", "Replication benchmark: size, power, ROC and FDR curves");
  auto* b_scn = bench_cmd->add_option("--scenario", bench.scenario, "Preset: A, B, B-appendix or C")->capture_default_str();
  auto* b_d = bench_cmd->add_option("--d", bench.d, "Number of mediators (custom scenario)");
  auto* b_p1 = bench_cmd->add_option("--p1", bench.p1, "Edge probability at the exposure and outcome");
  auto* b_p2 = bench_cmd->add_option("--p2", bench.p2, "Edge probability among mediators");
  b_d->excludes(b_scn);
  b_p1->excludes(b_scn);
  b_p2->excludes(b_scn);
  bench_cmd->add_option("--n", bench.ns, "Sample sizes")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps, "Replications R per sample size")->capture_default_str();
  bench_cmd->add_option("--alphas", bench.alphas, "Alpha sweep for rejection rates and ROC points")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--fdr-levels", bench.fdr_levels, "FDR levels")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Output directory")->capture_default_str();
  add_inference_flags(bench_cmd, bench.options, bench_lambda);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim, std::cout);
    if (*test_cmd) {
      resolve_lambda(test.options, test_lambda);
      return run_test(test, std::cout);
    }
    if (*fdr_cmd) {
      resolve_lambda(fdr.options, fdr_lambda);
      fdr.baseline_by = baseline == "by";
      return run_fdr(fdr, std::cout);
    }
    if (*bench_cmd) {
      resolve_lambda(bench.options, bench_lambda);
      if (b_d->count() + b_p1->count() + b_p2->count() > 0) bench.scenario.reset();
      return run_bench_command(bench, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kUsage;
}
