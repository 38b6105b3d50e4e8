#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "logan/sem.hpp"
#include "support.hpp"

using namespace logan;
using logan::testing::enumerate_paths;
using logan::testing::cancelling_graph;

namespace {

SemModel model_of(const Matrix& w) {
  SemModel m;
  m.w = w;
  m.mu = Vector::Zero(w.rows());
  m.sigma_star = 1.0;
  return m;
}

}  // namespace

TEST(SemValidate, RejectsCyclesAndForbiddenEdges) {
  Matrix w = cancelling_graph();
  EXPECT_NO_THROW(validate(model_of(w)));
  Matrix cyc = w;
  cyc(2, 3) = 0.5;
  EXPECT_THROW(validate(model_of(cyc)), ModelError);
  Matrix into_exposure = w;
  into_exposure(0, 1) = 1.0;
  EXPECT_THROW(validate(model_of(into_exposure)), ModelError);
  Matrix out_of_outcome = w;
  out_of_outcome(1, 4) = 1.0;
  EXPECT_THROW(validate(model_of(out_of_outcome)), ModelError);
  SemModel bad_sigma = model_of(w);
  bad_sigma.sigma_star = 0.0;
  EXPECT_THROW(validate(bad_sigma), ModelError);
}

TEST(SemSample, CyclicModelIsRejected) {
  Matrix w = cancelling_graph();
  w(2, 3) = 0.5;
  EXPECT_THROW(sample(model_of(w), 10, 1), ModelError);
}

TEST(SemSample, NoEdgesGivesStandardNormals) {
  const SemModel m = model_of(Matrix::Zero(4, 4));
  const Dataset d = sample(m, 20000, 3);
  const Matrix c = center(d).values;
  const Matrix cov = c.transpose() * c / (d.rows() - 1.0);
  EXPECT_LT((cov - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(SemSample, OutcomeVarianceOfCancellingGraph) {
  // X2 = e0 + e2, X3 = -X2 + e3, X4 = -X2 - X3 + e4 = e4 - e3, so Var(X4) = 2.
  const SemModel m = model_of(cancelling_graph());
  EXPECT_NEAR(population_covariance(m)(4, 4), 2.0, 1e-12);
  const Dataset d = sample(m, 100000, 11);
  const Matrix c = center(d).values;
  const double var = c.col(4).squaredNorm() / (d.rows() - 1.0);
  EXPECT_NEAR(var, 2.0, 0.05 * 2.0);
}

TEST(SemSample, MeanMatchesMu) {
  SemModel m = model_of(cancelling_graph());
  m.mu = Vector::LinSpaced(5, -2.0, 2.0);
  const int n = 5000;
  const Dataset d = sample(m, n, 12);
  const Vector mean = d.values.colwise().mean();
  const Vector sd = population_covariance(m).diagonal().cwiseSqrt();
  for (int j = 0; j < 5; ++j) EXPECT_LT(std::abs(mean(j) - m.mu(j)), 4.0 * sd(j) / std::sqrt(n));
}

TEST(SemSample, SeedDeterminism) {
  const SemModel m = model_of(cancelling_graph());
  EXPECT_EQ(sample(m, 50, 7).values, sample(m, 50, 7).values);
  EXPECT_NE(sample(m, 50, 7).values, sample(m, 50, 8).values);
}

TEST(SemSample, TopologicalOrderOfPermutedGraph) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix w = logan::testing::random_dag(rng, 7, 0.4);
    const auto order = topological_order(w);
    std::vector<int> pos(7);
    for (int k = 0; k < 7; ++k) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
    for (int j = 0; j < 7; ++j)
      for (int i = 0; i < 7; ++i)
        if (w(j, i) != 0.0) { EXPECT_LT(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]); }
  }
}

TEST(Scenario, StructureAndWeights) {
  ScenarioConfig cfg;
  cfg.seed = 99;
  const SemModel m = generate_scenario(cfg);
  EXPECT_EQ(m.dim(), 52);
  EXPECT_TRUE(m.w.triangularView<Eigen::Upper>().toDenseMatrix().isZero(0.0));
  EXPECT_TRUE(m.w.row(0).isZero(0.0));
  EXPECT_TRUE(m.w.col(51).isZero(0.0));
  EXPECT_EQ(m.mu, Vector::Ones(52));
  EXPECT_EQ(m.sigma_star, 1.0);
  int edges = 0;
  for (int i = 0; i < m.w.size(); ++i) {
    const double a = std::abs(m.w.data()[i]);
    if (a == 0.0) continue;
    ++edges;
    EXPECT_GE(a, 0.5);
    EXPECT_LE(a, 2.0);
  }
  EXPECT_GT(edges, 0);
}

TEST(Scenario, ZeroProbabilitiesGiveEmptyGraph) {
  ScenarioConfig cfg;
  cfg.d = 3;
  cfg.p1 = 0.0;
  cfg.p2 = 0.0;
  EXPECT_TRUE(generate_scenario(cfg).w.isZero(0.0));
}

TEST(Scenario, SeedDeterminismAndValidation) {
  ScenarioConfig cfg;
  cfg.seed = 5;
  EXPECT_EQ(generate_scenario(cfg).w, generate_scenario(cfg).w);
  cfg.d = 0;
  EXPECT_THROW(generate_scenario(cfg), ModelError);
}

TEST(Scenario, PresetsAndAliases) {
  EXPECT_EQ(find_preset("A").d, 50);
  EXPECT_EQ(find_preset("B").p1, 0.03);
  EXPECT_EQ(find_preset("B-appendix").p1, 0.025);
  EXPECT_THROW(find_preset("Z"), std::invalid_argument);
}

TEST(Scenario, NonzeroMediatorFractionNearReported) {
  // Reported average for Scenario A is 0.12; single graphs vary a lot.
  double sum = 0.0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    ScenarioConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(s);
    const Vector delta = mediation_strength(generate_scenario(cfg));
    sum += static_cast<double>((delta.array() != 0.0).count()) / delta.size();
  }
  const double mean = sum / seeds;
  EXPECT_GE(mean, 0.10);
  EXPECT_LE(mean, 0.20);
}

TEST(MediationStrength, CancellingGraph) {
  const Vector delta = mediation_strength(model_of(cancelling_graph()));
  EXPECT_EQ(delta(0), 0.0);  // M1 is isolated
  EXPECT_EQ(delta(1), 1.0);
  EXPECT_EQ(delta(2), 1.0);
}

TEST(MediationStrength, EmptyGraph) {
  EXPECT_TRUE(mediation_strength(model_of(Matrix::Zero(6, 6))).isZero(0.0));
}

TEST(MediationStrength, NonzeroIffBothPathsExist) {
  for (int s = 0; s < 40; ++s) {
    ScenarioConfig cfg;
    cfg.d = 6;
    cfg.p1 = 0.4;
    cfg.p2 = 0.3;
    cfg.seed = static_cast<std::uint64_t>(s);
    const SemModel m = generate_scenario(cfg);
    const Vector delta = mediation_strength(m);
    for (int q = 1; q <= 6; ++q) {
      const auto in = enumerate_paths(m.w, 0, q);
      const auto out = enumerate_paths(m.w, q, 7);
      EXPECT_EQ(delta(q - 1) != 0.0, in.exists && out.exists);
      EXPECT_EQ(delta(q - 1), in.bottleneck * out.bottleneck);
    }
  }
}

TEST(SemJson, RoundTrip) {
  ScenarioConfig cfg;
  cfg.d = 8;
  cfg.seed = 4;
  const SemModel m = generate_scenario(cfg);
  const SemModel back = sem_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.w, m.w);
  EXPECT_EQ(back.mu, m.mu);
  EXPECT_EQ(back.sigma_star, m.sigma_star);
  EXPECT_THROW(sem_from_json(nlohmann::json::parse(R"({"w": [[0]]})")), ModelError);
}
