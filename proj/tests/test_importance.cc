#include <gtest/gtest.h>

#include "ctximl/errors.h"
#include "ctximl/importance.h"
#include "ctximl/reference_predictor.h"
#include "ctximl/shapley.h"
#include "test_util.h"

namespace ctximl {
namespace {

using testing::Rows;
using testing::Vec;

TEST(Loco, MatchesHighPrecisionOracle) {
  const Dataset train(Rows({{0, 1}, {1, 0}, {2, 2}, {-1, 0.5}}), Vec({0, 1, 1, 0}));
  const Dataset inference(Rows({{0.5, 0.5}, {1.5, 1}, {-0.5, 0}}), Vec({1, 1, 0}));
  const ReferencePredictor model;
  const ImportanceReport r = Loco(model, train, inference, RiskKind::kLogLoss);
  EXPECT_NEAR(r.baseline_risk, 0.34978815543362435274, 1e-14);
  EXPECT_NEAR(r.scores[0], 0.63921969842767669049, 1e-14);
  EXPECT_NEAR(r.scores[1], -0.074314663493658401796, 1e-14);
  EXPECT_EQ(r.cost.evaluation_calls, 3u);
}

TEST(Loco, ConstantColumnScoresExactlyZero) {
  Rng rng(41);
  for (Eigen::Index p : {2, 4, 6}) {
    Dataset base = testing::RandomDataset(rng, 50, p);
    Matrix x = base.features();
    x.col(p - 1).setConstant(1.25);
    Dataset inf_base = testing::RandomDataset(rng, 20, p);
    Matrix xi = inf_base.features();
    xi.col(p - 1).setConstant(1.25);
    const ReferencePredictor model;
    const ImportanceReport r =
        Loco(model, Dataset(x, base.labels()), Dataset(xi, inf_base.labels()), RiskKind::kBrier);
    EXPECT_EQ(r.scores[p - 1], 0.0);
    EXPECT_EQ(r.cost.evaluation_calls, static_cast<std::uint64_t>(p + 1));
  }
}

TEST(Sage, ExhaustiveEqualsBruteForceOnRiskGame) {
  Rng rng(42);
  const Dataset train = testing::RandomDataset(rng, 40, 4);
  const Dataset inference = testing::RandomDataset(rng, 25, 4);
  const ReferencePredictor model;
  const ImportanceReport r = Sage(model, train, inference, 14, RiskKind::kLogLoss, 1);
  const double empty = EmptyCoalitionRisk(train, inference, RiskKind::kLogLoss);
  const Matrix phi = BruteForceShapley(4, [&](std::uint64_t mask) {
    if (mask == 0) return Vec({empty});
    const Vector pred =
        ValueExactRetrain(model, train, inference.features(), FeatureSubset::FromMask(mask, 4));
    return Vec({EmpiricalRisk(pred, inference.labels(), RiskKind::kLogLoss)});
  });
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(r.scores[j], -phi(j, 0), 1e-10);
  EXPECT_NEAR(r.scores.sum(), r.empty_risk - r.baseline_risk, 1e-12);
}

TEST(Sage, SampledIsDeterministicAndEfficient) {
  Rng rng(43);
  const Dataset train = testing::RandomDataset(rng, 30, 6);
  const Dataset inference = testing::RandomDataset(rng, 20, 6);
  const ReferencePredictor model;
  const ImportanceReport a = Sage(model, train, inference, 20, RiskKind::kBrier, 5);
  const ImportanceReport b = Sage(model, train, inference, 20, RiskKind::kBrier, 5);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.seed, 5u);
  EXPECT_NEAR(a.scores.sum(), a.empty_risk - a.baseline_risk, 1e-12);
}

TEST(Sage, FeaturePermutationPermutesScores) {
  Rng rng(44);
  const Dataset train = testing::RandomDataset(rng, 30, 3);
  const Dataset inference = testing::RandomDataset(rng, 15, 3);
  const std::vector<int> perm = {2, 0, 1};
  auto permute = [&](const Dataset& d) {
    Matrix x(d.rows(), 3);
    for (int j = 0; j < 3; ++j) x.col(j) = d.features().col(perm[std::size_t(j)]);
    return Dataset(x, d.labels());
  };
  const ReferencePredictor model;
  const ImportanceReport r = Sage(model, train, inference, 6, RiskKind::kLogLoss, 0);
  const ImportanceReport rp =
      Sage(model, permute(train), permute(inference), 6, RiskKind::kLogLoss, 0);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(rp.scores[j], r.scores[perm[std::size_t(j)]], 1e-10);
}

TEST(Importance, RejectsShapeMismatch) {
  const ReferencePredictor model;
  const Dataset train(Rows({{0, 1}, {1, 0}}), Vec({0, 1}));
  const Dataset inference(Rows({{0, 1, 2}}), Vec({1}));
  EXPECT_THROW(Loco(model, train, inference, RiskKind::kBrier), ContractError);
  const Dataset one(Rows({{0}, {1}}), Vec({0, 1}));
  EXPECT_THROW(Loco(model, one, one, RiskKind::kBrier), ContractError);
}

}  // namespace
}  // namespace ctximl
