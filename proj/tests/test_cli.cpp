#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "logan/commands.hpp"
#include "support.hpp"

using namespace logan;
using namespace logan::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            ("logan_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

InferenceOptions quick(std::uint64_t seed) {
  InferenceOptions o;
  o.m = 200;
  o.seed = seed;
  return o;
}

// small custom scenario written with simulate
std::string small_dataset(const TempDir& dir, int n = 80) {
  SimulateConfig c;
  c.d = 6;
  c.p1 = 0.5;
  c.p2 = 0.3;
  c.n = n;
  c.seed = 3;
  c.out = dir / "sim";
  std::ostringstream log;
  run_simulate(c, log);
  return c.out + "/data.csv";
}

}  // namespace

TEST(Simulate, ScenarioAShapeAndDeterminism) {
  TempDir dir;
  SimulateConfig c;
  c.scenario = "A";
  c.n = 200;
  c.seed = 7;
  c.out = dir / "a";
  std::ostringstream log;
  EXPECT_EQ(run_simulate(c, log), kOk);
  const Dataset d = read_csv_file(c.out + "/data.csv");
  EXPECT_EQ(d.rows(), 200);
  EXPECT_EQ(d.dim(), 52);
  const std::string first = slurp(c.out + "/data.csv") + slurp(c.out + "/model.json") + slurp(c.out + "/delta.csv");
  c.out = dir / "b";
  run_simulate(c, log);
  EXPECT_EQ(first, slurp(c.out + "/data.csv") + slurp(c.out + "/model.json") + slurp(c.out + "/delta.csv"));
}

TEST(Simulate, NoEdgeModel) {
  TempDir dir;
  SimulateConfig c;
  c.d = 3;
  c.p1 = 0.0;
  c.p2 = 0.0;
  c.n = 10;
  c.out = dir.str();
  std::ostringstream log;
  run_simulate(c, log);
  const auto j = nlohmann::json::parse(slurp(dir / "model.json"));
  const SemModel m = sem_from_json(j.at("model"));
  EXPECT_TRUE(m.w.isZero(0.0));
  EXPECT_EQ(m.dim(), 5);
  EXPECT_EQ(read_csv_file(dir / "data.csv").rows(), 10);
}

TEST(Simulate, CsvRoundTripOfModelSample) {
  TempDir dir;
  SimulateConfig c;
  c.d = 4;
  c.n = 30;
  c.seed = 11;
  c.out = dir.str();
  std::ostringstream log;
  run_simulate(c, log);
  const ScenarioConfig s = resolve_scenario(c);
  const Dataset direct = sample(generate_scenario(s), 30, derive_seed(11, {stream::data}));
  const Dataset back = read_csv_file(dir / "data.csv");
  for (Eigen::Index i = 0; i < direct.values.size(); ++i) {
    const double a = direct.values.data()[i];
    EXPECT_LE(std::abs(a - back.values.data()[i]), 1e-15 * std::max(1.0, std::abs(a)));
  }
}

TEST(Simulate, UnknownScenarioIsUsageError) {
  TempDir dir;
  SimulateConfig c;
  c.scenario = "Q";
  c.out = dir.str();
  std::ostringstream log;
  try {
    run_simulate(c, log);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_code_for(e), kUsage);
  }
}

TEST(TestCommand, WritesReportWithConfig) {
  TempDir dir;
  TestConfig c;
  c.data = small_dataset(dir);
  c.mediators = {"1", "M3"};
  c.options = quick(5);
  c.report = dir / "r.json";
  std::ostringstream out;
  EXPECT_EQ(run_test(c, out), kOk);
  const auto j = nlohmann::json::parse(slurp(c.report));
  EXPECT_EQ(j["config"]["options"]["seed"], 5);
  EXPECT_EQ(j["config"]["settings"]["m"], 200);
  ASSERT_EQ(j["results"].size(), 2u);
  EXPECT_EQ(j["results"][1]["q"], 3);
  EXPECT_EQ(j["results"][1]["name"], "M3");
  EXPECT_NE(out.str().find("M3"), std::string::npos);

  const std::string first = slurp(c.report);
  run_test(c, out);
  EXPECT_EQ(first, slurp(c.report));
}

TEST(TestCommand, MultiSplitReport) {
  TempDir dir;
  TestConfig c;
  c.data = small_dataset(dir);
  c.mediators = {"2"};
  c.options = quick(5);
  c.options.multisplit = 3;
  c.report = dir / "r.json";
  std::ostringstream out;
  run_test(c, out);
  const auto j = nlohmann::json::parse(slurp(c.report));
  EXPECT_EQ(j["method"], "multi-split");
  EXPECT_EQ(j["results"][0]["p_exposure"].size(), 6u);
  EXPECT_EQ(j["diagnostics"].size(), 3u);
}

TEST(TestCommand, MediatorOutOfRangeIsUsageError) {
  TempDir dir;
  TestConfig c;
  c.data = small_dataset(dir);
  c.mediators = {"7"};
  c.options = quick(1);
  c.report = dir / "r.json";
  std::ostringstream out;
  try {
    run_test(c, out);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_code_for(e), kUsage);
  }
  c.mediators = {"nonexistent"};
  EXPECT_THROW(run_test(c, out), UsageError);
  c.mediators.clear();
  EXPECT_THROW(run_test(c, out), UsageError);
}

TEST(TestCommand, MalformedCsvIsDataError) {
  TempDir dir;
  write(dir / "bad.csv", "E,M,Y\n1,2,3\n1,x,3\n");
  TestConfig c;
  c.data = dir / "bad.csv";
  c.all = true;
  c.options = quick(1);
  c.report = dir / "r.json";
  std::ostringstream out;
  try {
    run_test(c, out);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_code_for(e), kData);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(TestCommand, InvalidOptionsAreUsageErrors) {
  InferenceOptions o;
  o.alpha = 1.0;
  EXPECT_THROW(validate(o), UsageError);
  o = InferenceOptions{};
  o.penalty = "scad";
  EXPECT_THROW(validate(o), UsageError);
  o = InferenceOptions{};
  o.multisplit = 0;
  EXPECT_THROW(validate(o), UsageError);
}

TEST(TestCommand, NumericalFailureExitCode) {
  EXPECT_EQ(exit_code_for(NumericalError("x")), kNumerical);
  EXPECT_EQ(exit_code_for(ConvergenceError("x", 1.0, Matrix())), kNumerical);
  EXPECT_EQ(exit_code_for(ModelError("x")), kData);
}

TEST(FdrCommand, RoleMapSidecar) {
  TempDir dir;
  write(dir / "d.csv",
        "Y,m1,AGE,m2\n"
        "1,2,3,4\n2,3,1,5\n3,1,2,2\n0,1,1,1\n4,2,2,6\n1,1,0,2\n2,2,2,3\n3,0,1,1\n");
  write(dir / "roles.json", R"({"exposure": "AGE", "outcome": "Y"})");
  FdrConfig c;
  c.data = dir / "d.csv";
  c.roles_file = dir / "roles.json";
  c.options = quick(2);
  c.options.alpha = 0.1;
  c.baseline_by = true;
  c.report = dir / "f.json";
  std::ostringstream out;
  EXPECT_EQ(run_fdr(c, out), kOk);
  const auto j = nlohmann::json::parse(slurp(c.report));
  EXPECT_EQ(j["dataset"]["columns"][0], "AGE");
  EXPECT_EQ(j["dataset"]["columns"][3], "Y");
  EXPECT_TRUE(j.contains("by"));
  EXPECT_TRUE(j["by"]["selected"].is_array());

  c.roles.outcome = "m2";
  EXPECT_THROW(run_fdr(c, out), UsageError);
  write(dir / "roles2.json", R"({"exposure": ["AGE", "m1"]})");
  c.roles = RoleMap{};
  c.roles_file = dir / "roles2.json";
  EXPECT_THROW(run_fdr(c, out), DataError);
}

TEST(Bench, SmokeRunAndMonotoneSweep) {
  TempDir dir;
  BenchConfig c;
  c.scenario.reset();
  c.d = 6;
  c.p1 = 0.5;
  c.p2 = 0.3;
  c.ns = {60};
  c.reps = 2;
  c.options = quick(4);
  c.out = dir / "bench";
  std::ostringstream out;
  EXPECT_EQ(run_bench_command(c, out), kOk);
  for (const char* f : {"rejection.csv", "roc.csv", "fdr.csv", "replications.csv", "bench.json"})
    EXPECT_TRUE(fs::exists(c.out + "/" + f)) << f;

  const BenchResult res = run_bench(c);
  for (Node q = 1; q <= 6; ++q) {
    double prev = 0.0;
    for (double a : alpha_grid(c)) {
      const double r = res.rejection_rate(0, q, Method::Single, a);
      EXPECT_GE(r, prev);
      prev = r;
    }
  }
}

TEST(Bench, IdenticalFilesAcrossThreadCounts) {
  TempDir dir;
  BenchConfig c;
  c.scenario.reset();
  c.d = 5;
  c.p1 = 0.5;
  c.p2 = 0.3;
  c.ns = {50};
  c.reps = 3;
  c.options = quick(8);
  c.options.multisplit = 2;
  std::ostringstream out;
  std::string files[2];
  for (int k = 0; k < 2; ++k) {
    logan::testing::EnvGuard env("LOGAN_THREADS", k == 0 ? "1" : "3");
    c.out = dir / ("b" + std::to_string(k));
    run_bench_command(c, out);
    for (const char* f : {"rejection.csv", "roc.csv", "fdr.csv", "replications.csv", "bench.json"})
      files[k] += slurp(c.out + "/" + f);
  }
  EXPECT_EQ(files[0], files[1]);
}
