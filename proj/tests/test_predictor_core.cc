#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ctximl/cost.h"
#include "ctximl/errors.h"
#include "ctximl/reference_predictor.h"
#include "ctximl/risk.h"
#include "test_util.h"

namespace ctximl {
namespace {

using testing::Rows;
using testing::Vec;

Dataset FixtureA() {
  return Dataset(Rows({{0, 0}, {1, 0.5}, {-0.5, 1}, {2, -1}, {0.3, 0.3}, {-1.2, -0.7}, {1.5, 1.5},
                       {0, -2}}),
                 Vec({0, 1, 0, 1, 1, 0, 1, 0}));
}

TEST(TokenCost, MatchesPairCount) {
  EXPECT_EQ(TokenCost(256, 128), 65408u);
  EXPECT_EQ(TokenCost(1, 7), 7u);
  EXPECT_EQ(TokenCost(100, 50), 4950u + 5000u);
  EXPECT_THROW(TokenCost(0, 5), ContractError);
}

TEST(CostLedger, AccumulatesAndResets) {
  CostLedger ledger;
  ledger.Record(10, 5);
  ledger.Record(3, 1);
  EXPECT_EQ(ledger.Snapshot(), (LedgerSnapshot{45 + 50 + 3 + 3, 2}));
  ledger.Reset();
  EXPECT_EQ(ledger.Snapshot(), LedgerSnapshot{});
}

TEST(Dataset, RejectsBadInput) {
  EXPECT_THROW(Dataset(Rows({{1, 2}}), Vec({0.5})), ContractError);
  EXPECT_THROW(Dataset(Rows({{1, 2}, {3, 4}}), Vec({0})), ContractError);
  EXPECT_THROW(Dataset(Rows({{1, std::numeric_limits<double>::quiet_NaN()}}), Vec({1})),
               ContractError);
  const Dataset d(Rows({{1, 2}, {3, 4}}), Vec({0, 1}));
  EXPECT_EQ(d.column_names(), (std::vector<std::string>{"x0", "x1"}));
  EXPECT_DOUBLE_EQ(d.PositiveRate(), 0.5);
}

TEST(Subsets, RestrictFeaturesAndObservations) {
  const Dataset d = FixtureA();
  const Dataset cols = RestrictFeatures(d, FeatureSubset::FromMask(0b10, 2));
  ASSERT_EQ(cols.cols(), 1);
  EXPECT_EQ(cols.column_names()[0], "x1");
  EXPECT_EQ(cols.features().col(0), d.features().col(1));
  const Dataset rows = RestrictObservations(d, ObservationSubset::FromIndices({1, 6}, 8));
  ASSERT_EQ(rows.rows(), 2);
  EXPECT_EQ(rows.features().row(1), d.features().row(6));
  EXPECT_EQ(FeatureSubset::FromMask(0b101, 3).Complement(), FeatureSubset::FromMask(0b010, 3));
  EXPECT_EQ(RestrictFeatures(d, FeatureSubset(2)).cols(), 0);
}

TEST(Standardizer, ZeroMeanUnitScaleAndConstantColumns) {
  const Matrix x = Rows({{1, 5}, {2, 5}, {3, 5}});
  const Standardizer s = Standardizer::Fit(x);
  const Matrix z = s.Apply(x);
  EXPECT_NEAR(z.col(0).mean(), 0.0, 1e-15);
  EXPECT_NEAR(z.col(0).squaredNorm() / 3.0, 1.0, 1e-15);
  EXPECT_EQ(z.col(1), Vector::Zero(3));
}

TEST(ReferencePredict, MatchesHighPrecisionOracle) {
  const Dataset train = FixtureA();
  const Vector p = ReferencePredict(train.features(), train.labels(),
                                    Rows({{0.1, 0.2}, {1, 1}, {-1, 0.5}}), 1.0);
  EXPECT_NEAR(p[0], 0.49663786995057843452, 1e-14);
  EXPECT_NEAR(p[1], 0.87990671562150834482, 1e-14);
  EXPECT_NEAR(p[2], 0.14898858214024194319, 1e-14);
}

TEST(ReferencePredict, XorOracle) {
  const Matrix x = Rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const Vector p = ReferencePredict(x, Vec({0, 0, 1, 1}),
                                    Rows({{0.25, 0.75}, {0.5, 0.5}, {0.9, 0.1}, {0, 0}}), 1.0);
  EXPECT_NEAR(p[0], 0.52999257559681102186, 1e-14);
  EXPECT_NEAR(p[1], 0.5, 1e-14);
  EXPECT_NEAR(p[2], 0.57218060695941115497, 1e-14);
  EXPECT_NEAR(p[3], 0.39322386648296370507, 1e-14);
}

TEST(ReferencePredict, SinglePositiveRowGivesOne) {
  const Vector p = ReferencePredict(Rows({{3, -1}}), Vec({1}), Rows({{0, 0}, {100, 100}}), 1.0);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 1.0);
}

TEST(ReferencePredict, FarQueriesStayFinite) {
  const Dataset train = FixtureA();
  const Vector p = ReferencePredict(train.features(), train.labels(), Rows({{1e3, -1e3}}), 0.1);
  EXPECT_TRUE(std::isfinite(p[0]));
}

TEST(ReferencePredict, PermutationInvariantExactly) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset train = testing::RandomDataset(rng, 40, 3);
    const Matrix q = testing::RandomMatrix(rng, 10, 3);
    std::vector<std::size_t> order(40);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.Shuffle(order);
    const Dataset shuffled = SelectRows(train, order);
    EXPECT_EQ(ReferencePredict(train.features(), train.labels(), q, 1.0),
              ReferencePredict(shuffled.features(), shuffled.labels(), q, 1.0));
  }
}

TEST(ReferencePredict, OutputsInLabelHull) {
  Rng rng(6);
  const Dataset train = testing::RandomDataset(rng, 30, 4);
  const Vector p =
      ReferencePredict(train.features(), train.labels(), testing::RandomMatrix(rng, 200, 4), 0.7);
  EXPECT_GE(p.minCoeff(), 0.0);
  EXPECT_LE(p.maxCoeff(), 1.0);
  const Vector ones = ReferencePredict(train.features(), Vector::Ones(30),
                                       testing::RandomMatrix(rng, 20, 4), 0.7);
  EXPECT_EQ(ones, Vector::Ones(20));
}

TEST(ReferencePredict, ConstantColumnDoesNotChangeOutput) {
  Rng rng(7);
  const Dataset base = testing::RandomDataset(rng, 25, 2);
  Matrix x(25, 3);
  x << base.features(), Vector::Constant(25, 4.2);
  const Dataset with_const(x, base.labels());
  Matrix q = testing::RandomMatrix(rng, 6, 3);
  q.col(2).setConstant(4.2);
  const ReferencePredictor model;
  const Vector full = model.Predict(with_const, q).probabilities;
  const FeatureSubset keep = FeatureSubset::FromMask(0b011, 3);
  const Vector reduced =
      model.Predict(RestrictFeatures(with_const, keep), RestrictColumns(q, keep)).probabilities;
  EXPECT_EQ(full, reduced);
}

TEST(Predictor, ContractChecksAndLedger) {
  const ReferencePredictor model;
  const Dataset train = FixtureA();
  EXPECT_THROW(model.Predict(train, Rows({{1, 2, 3}})), ContractError);
  EXPECT_THROW(model.Predict(Dataset(Matrix(0, 2), Vector(0)), Rows({{1, 2}})), ContractError);
  EXPECT_EQ(model.Predict(train, Matrix(0, 2)).size(), 0);
  EXPECT_EQ(model.ledger().Snapshot(), LedgerSnapshot{});
  model.Predict(train, Rows({{1, 2}, {0, 0}}));
  EXPECT_EQ(model.ledger().Snapshot(), (LedgerSnapshot{TokenCost(8, 2), 1}));
  EXPECT_THROW(ReferencePredictor(0.0), ContractError);
  EXPECT_THROW(ReferencePredictor(-1.0), ContractError);
}

TEST(PredictChunked, ChargesOnePassPerChunk) {
  const ReferencePredictor model;
  const Dataset train = FixtureA();
  Rng rng(2);
  const Matrix q = testing::RandomMatrix(rng, 10, 2);
  const Vector chunked = PredictChunked(model, train, q, 4);
  EXPECT_EQ(model.ledger().Snapshot(),
            (LedgerSnapshot{2 * TokenCost(8, 4) + TokenCost(8, 2), 3}));
  EXPECT_EQ(chunked, ReferencePredict(train.features(), train.labels(), q, 1.0));
}

TEST(Risk, OracleValues) {
  const Vector p = Vec({0.9, 0.2, 0.6, 0.35});
  const Vector y = Vec({1, 0, 0, 1});
  EXPECT_NEAR(EmpiricalRisk(p, y, RiskKind::kLogLoss), 0.57365423083621720191, 1e-15);
  EXPECT_NEAR(EmpiricalRisk(p, y, RiskKind::kBrier), 0.208125, 1e-15);
  EXPECT_NEAR(EmpiricalRisk(p, y, RiskKind::kOneMinusAuc), 0.25, 1e-15);
}

TEST(Risk, EdgeCases) {
  EXPECT_THROW(EmpiricalRisk(Vec({0.5, 0.5}), Vec({1, 1}), RiskKind::kOneMinusAuc), ContractError);
  EXPECT_THROW(EmpiricalRisk(Vec({0.5}), Vec({1, 0}), RiskKind::kBrier), ContractError);
  EXPECT_NEAR(EmpiricalRisk(Vec({0.0}), Vec({1}), RiskKind::kLogLoss), -std::log(1e-12), 1e-9);
  EXPECT_DOUBLE_EQ(RocAuc(Vec({0.5, 0.5, 0.5}), Vec({0, 1, 1})), 0.5);
  EXPECT_THROW(RiskDerivative(Vec({0.5}), Vec({1}), RiskKind::kOneMinusAuc), ContractError);
  EXPECT_EQ(ParseRiskKind("brier"), RiskKind::kBrier);
  EXPECT_FALSE(ParseRiskKind("accuracy").has_value());
}

// Central differences of the empirical risk in training row `row`.
Vector FiniteDifferenceTrainGradient(const Dataset& train, const Dataset& inference,
                                     RiskKind kind, Eigen::Index row, double bandwidth) {
  const double h = 1e-6;
  const Eigen::Index p = train.cols();
  Vector g(p + 1);
  for (Eigen::Index c = 0; c <= p; ++c) {
    auto risk_at = [&](double delta) {
      Matrix x = train.features();
      Vector y = train.labels();
      if (c < p)
        x(row, c) += delta;
      else
        y[row] += delta;
      return EmpiricalRisk(ReferencePredict(x, y, inference.features(), bandwidth),
                           inference.labels(), kind);
    };
    g[c] = (risk_at(h) - risk_at(-h)) / (2 * h);
  }
  return g;
}

TEST(RiskGradient, MatchesFiniteDifferences) {
  Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.UniformIndex(20));
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.UniformIndex(4));
    const Dataset train = testing::RandomDataset(rng, n, p);
    const Dataset inference = testing::RandomDataset(rng, 6, p);
    const double bandwidth = 0.7 + rng.Uniform();
    const RiskKind kind = trial % 2 ? RiskKind::kLogLoss : RiskKind::kBrier;
    const Eigen::Index row = static_cast<Eigen::Index>(rng.UniformIndex(std::uint64_t(n)));
    const Vector analytic = ReferenceGradientWrtTrain(train, inference, kind, row, bandwidth);
    const Vector fd = FiniteDifferenceTrainGradient(train, inference, kind, row, bandwidth);
    for (Eigen::Index c = 0; c < analytic.size(); ++c) {
      EXPECT_TRUE(testing::RelClose(analytic[c], fd[c], 1e-4, 1e-5))
          << "trial " << trial << " coordinate " << c << ": " << analytic[c] << " vs " << fd[c];
      ++checked;
    }
  }
  EXPECT_GT(checked, 200);
}

}  // namespace
}  // namespace ctximl
