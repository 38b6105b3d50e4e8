#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "logan/mediate.hpp"
#include "logan/sem.hpp"
#include "support.hpp"

using namespace logan;
using logan::testing::cancelling_graph;

namespace {

Dataset cancelling_graph_data(int n, std::uint64_t seed) {
  SemModel m;
  m.w = cancelling_graph();
  m.mu = Vector::Ones(5);
  return sample(m, n, seed);
}

LoganSettings quick_settings(std::uint64_t seed, int m = 500) {
  LoganSettings s;
  s.m = m;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(Split, SizesAndCoverage) {
  const SplitPlan p = split(11, 3);
  EXPECT_EQ(p.halves[0].size(), 6u);
  EXPECT_EQ(p.halves[1].size(), 5u);
  std::vector<int> all = p.halves[0];
  all.insert(all.end(), p.halves[1].begin(), p.halves[1].end());
  std::sort(all.begin(), all.end());
  std::vector<int> expect(11);
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(all, expect);
  EXPECT_TRUE(std::is_sorted(p.halves[0].begin(), p.halves[0].end()));
  EXPECT_EQ(split(11, 3).halves, p.halves);
  EXPECT_NE(split(40, 3).halves[0], split(40, 4).halves[0]);
}

TEST(QuantileCombine, OrderStatisticOverGamma) {
  const std::vector<double> p{0.5, 0.01, 0.9, 0.02};
  EXPECT_DOUBLE_EQ(quantile_combine(p, 0.5), 0.04);
  EXPECT_DOUBLE_EQ(quantile_combine(p, 0.15), 0.01 / 0.15);
  EXPECT_DOUBLE_EQ(quantile_combine({0.3, 0.4}, 0.15), 1.0);
  EXPECT_THROW(quantile_combine({}, 0.5), std::invalid_argument);
  EXPECT_THROW(quantile_combine(p, 1.0), std::invalid_argument);
}

TEST(ScreenMin, HandWorkedThreshold) {
  Vector p(4);
  p << 0.001, 0.002, 0.3, 0.5;
  // c = 0.1/k: k=1 -> 0.1 * 2 > 0.1; k=2 -> 0.05 * 2 <= 0.1, the largest admissible c.
  EXPECT_DOUBLE_EQ(screen_threshold(p, 0.1), 0.05);
  Vector none = Vector::Constant(4, 0.9);
  EXPECT_DOUBLE_EQ(screen_threshold(none, 0.1), 0.1);
}

TEST(ByStepUp, HandWorkedCutoff) {
  Vector p(4);
  p << 0.04, 0.001, 0.5, 0.01;
  // thresholds i * 0.1 / (2 * 4 * (1 + 1/2 + 1/3 + 1/4)) = 0.006 i
  EXPECT_EQ(by_select(p, {0, 1, 2, 3}, 0.1), (std::vector<int>{1, 3}));
  EXPECT_EQ(by_select(p, {0, 2}, 0.1), (std::vector<int>{}));
  EXPECT_TRUE(by_select(p, {}, 0.1).empty());
}

TEST(Fdr, UnionOverHalvesAndBaseline) {
  PValueTable t;
  t.p_exposure[0] = Vector(4);
  t.p_outcome[0] = Vector(4);
  t.p_exposure[1] = Vector(4);
  t.p_outcome[1] = Vector(4);
  t.p_exposure[0] << 0.0001, 0.0002, 0.6, 0.7;
  t.p_outcome[0] << 0.0003, 0.5, 0.6, 0.8;
  t.p_exposure[1] << 0.4, 0.0001, 0.6, 0.9;
  t.p_outcome[1] << 0.5, 0.0004, 0.3, 0.9;
  const FdrReport r = fdr_from_pvalues(t, 0.1, true);
  EXPECT_EQ(r.halves[0].selected, (std::vector<Node>{1}));
  EXPECT_EQ(r.halves[1].selected, (std::vector<Node>{2}));
  EXPECT_EQ(r.selected, (std::vector<Node>{1, 2}));
  const FdrReport by = fdr_from_pvalues(t, 0.1, false);
  EXPECT_EQ(by.halves[0].screened.size(), 4u);
  EXPECT_LE(by.selected.size(), r.selected.size());
}

TEST(SubTest, RejectsAtIsMonotoneAndMatchesReportLevel) {
  SubTest t;
  t.s_size = 3;
  t.m = 1000;
  for (int exceed : {0, 10, 24, 25, 26, 60, 500}) {
    t.exceed = exceed;
    bool prev = false;
    for (double a : {0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) {
      const bool now = t.rejects_at(a);
      EXPECT_TRUE(now || !prev);
      prev = now;
    }
  }
  t.exceed = 25;  // k = ceil(0.975 * 1000) = 975 -> reject iff exceed <= 25
  EXPECT_TRUE(t.rejects_at(0.05));
  t.exceed = 26;
  EXPECT_FALSE(t.rejects_at(0.05));
  t.s_size = 0;
  t.exceed = 0;
  EXPECT_FALSE(t.rejects_at(0.4));
}

TEST(Logan, CancellingGraphMediatorDetected) {
  int rejections = 0;
  const int reps = 10;
  for (int r = 0; r < reps; ++r) {
    const Dataset d = cancelling_graph_data(1000, 100 + r);
    const std::vector<Node> qs{1, 2, 3};
    const auto reports = test_mediators(d, qs, 0.05, quick_settings(r));
    rejections += reports[1].reject;
    // M1 is isolated: no estimated path can be tested, so it is retained.
    EXPECT_FALSE(reports[0].reject);
  }
  EXPECT_GE(rejections, 9);
}

TEST(Logan, ReportIsConsistentWithSubTests) {
  const Dataset d = cancelling_graph_data(400, 5);
  const MediationReport r = test_mediator(d, 2, 0.05, quick_settings(1));
  for (int l = 0; l < 2; ++l) {
    EXPECT_EQ(r.half_reject[l], r.sub[l][0].reject && r.sub[l][1].reject);
    for (int k = 0; k < 2; ++k) {
      EXPECT_EQ(r.sub[l][k].reject, r.sub[l][k].rejects_at(0.05));
      EXPECT_DOUBLE_EQ(r.sub[l][k].p_value, static_cast<double>(r.sub[l][k].exceed) / r.sub[l][k].m);
    }
  }
  EXPECT_EQ(r.reject, r.half_reject[0] || r.half_reject[1]);
  EXPECT_EQ(r.reject, r.rejects_at(0.05));
  EXPECT_GT(r.sigma2, 0.5);
  EXPECT_LT(r.sigma2, 1.5);
}

TEST(Logan, RejectsBadArguments) {
  const Dataset d = cancelling_graph_data(50, 5);
  EXPECT_THROW(test_mediator(d, 0, 0.05, quick_settings(1)), std::out_of_range);
  EXPECT_THROW(test_mediator(d, 4, 0.05, quick_settings(1)), std::out_of_range);
  EXPECT_THROW(test_mediator(d, 2, 1.5, quick_settings(1)), std::invalid_argument);
}

TEST(Logan, FailedHalvesRetain) {
  ScenarioConfig cfg;
  cfg.d = 8;
  cfg.p1 = 0.6;
  cfg.p2 = 0.6;
  cfg.seed = 6;
  const Dataset d = sample(generate_scenario(cfg), 200, 2);
  LoganSettings s = quick_settings(1);
  s.auto_lambda = false;
  s.notears.lambda = 0.01;
  s.notears.max_outer = 1;
  s.notears.rho_max = 1.0;
  const MediationReport r = test_mediator(d, 3, 0.05, s);
  EXPECT_TRUE(r.half_failed[0]);
  EXPECT_TRUE(r.half_failed[1]);
  EXPECT_FALSE(r.reject);
  for (int l = 0; l < 2; ++l) EXPECT_EQ(r.sub[l][0].p_value, 1.0);
}

TEST(Logan, DeterministicAcrossThreadCounts) {
  ScenarioConfig cfg;
  cfg.d = 10;
  cfg.p1 = 0.3;
  cfg.p2 = 0.2;
  cfg.seed = 12;
  const Dataset d = sample(generate_scenario(cfg), 120, 3);
  const auto qs = all_mediators(10);
  std::vector<MediationReport> a, b;
  {
    logan::testing::EnvGuard env("LOGAN_THREADS", "1");
    a = test_mediators(d, qs, 0.05, quick_settings(9));
  }
  {
    logan::testing::EnvGuard env("LOGAN_THREADS", "3");
    b = test_mediators(d, qs, 0.05, quick_settings(9));
  }
  for (std::size_t k = 0; k < a.size(); ++k)
    for (int l = 0; l < 2; ++l)
      for (int s = 0; s < 2; ++s) {
        EXPECT_EQ(a[k].sub[l][s].exceed, b[k].sub[l][s].exceed);
        EXPECT_EQ(a[k].sub[l][s].statistic, b[k].sub[l][s].statistic);
      }
}

TEST(MultiSplit, CombinesAllHalves) {
  const Dataset d = cancelling_graph_data(300, 8);
  const MultiSplitReport r = test_mediator_multisplit(d, 2, 0.05, 3, 0.15, quick_settings(4));
  EXPECT_EQ(r.splits, 3);
  EXPECT_EQ(r.p_exposure.size(), 6u);
  EXPECT_EQ(r.p_value, std::max(r.p_exposure_combined, r.p_outcome_combined));
  EXPECT_EQ(r.p_exposure_combined, quantile_combine(r.p_exposure, 0.15));
  EXPECT_EQ(r.reject, r.p_value <= 0.05);
}
