#include <gtest/gtest.h>

#include "ctximl/cost.h"
#include "ctximl/errors.h"
#include "ctximl/feature_effects.h"
#include "ctximl/reference_predictor.h"
#include "test_util.h"

namespace ctximl {
namespace {

using testing::Rows;
using testing::Vec;

TEST(BuildGrid, QuantileMatchesInterpolatedOracle) {
  const Vector column = Vec({3.1, -0.4, 2.2, 0.9, 5.0, 1.7, -1.3, 0.0, 2.8, 4.4,
                             0.6, 1.1, 3.9, -2.0, 2.5, 0.2, 1.9, 3.3, -0.8, 1.4});
  const GridSpec grid = BuildGrid(column, 5, GridStrategy::kQuantile, 3);
  ASSERT_EQ(grid.points.size(), 5u);
  const double expected[] = {-2.0, 0.15, 1.55, 2.875, 5.0};
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(grid.points[std::size_t(k)], expected[k], 1e-12);
  EXPECT_EQ(grid.feature_index, 3);
}

TEST(BuildGrid, UniqueUniformAndDegenerate) {
  const Vector column = Vec({2, 1, 2, 3, 1});
  EXPECT_EQ(BuildGrid(column, 99, GridStrategy::kUniqueValues).points,
            (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(BuildGrid(column, 5, GridStrategy::kUniform).points,
            (std::vector<double>{1, 1.5, 2, 2.5, 3}));
  EXPECT_EQ(BuildGrid(Vec({1, 1, 1, 2}), 3, GridStrategy::kQuantile).points,
            (std::vector<double>{1, 2}));
  EXPECT_THROW(BuildGrid(Vec({4, 4, 4}), 5, GridStrategy::kQuantile), ContractError);
  EXPECT_EQ(ParseGridStrategy("quantile"), GridStrategy::kQuantile);
  EXPECT_FALSE(ParseGridStrategy("log").has_value());
}

struct EffectCase {
  Eigen::Index n_train, n_inf, p;
  int grid_points;
};

TEST(Ice, BatchedEqualsNaiveAndChargesOnePass) {
  Rng rng(21);
  for (const EffectCase c : {EffectCase{100, 10, 3, 5}, EffectCase{40, 25, 2, 16},
                             EffectCase{64, 7, 5, 32}}) {
    const Dataset train = testing::RandomDataset(rng, c.n_train, c.p);
    const Matrix inference = testing::RandomMatrix(rng, c.n_inf, c.p);
    const GridSpec grid =
        BuildGrid(inference.col(1), c.grid_points, GridStrategy::kUniform, 1);
    const auto g = static_cast<std::uint64_t>(grid.points.size());

    const ReferencePredictor batched_model, naive_model;
    const EffectCurve batched = Ice(batched_model, train, inference, grid);
    const EffectCurve naive = IceNaive(naive_model, train, inference, grid);
    EXPECT_LE((batched.values - naive.values).cwiseAbs().maxCoeff(), 1e-12);

    const auto n = static_cast<std::uint64_t>(c.n_train);
    const auto m = static_cast<std::uint64_t>(c.n_inf);
    EXPECT_EQ(batched_model.ledger().Snapshot(), (LedgerSnapshot{TokenCost(n, m * g), 1}));
    EXPECT_EQ(naive_model.ledger().Snapshot(), (LedgerSnapshot{g * TokenCost(n, m), g}));

    const EffectCurve pd = PartialDependence(batched_model, train, inference, grid);
    const EffectCurve pd_naive = PartialDependenceNaive(naive_model, train, inference, grid);
    EXPECT_LE((pd.values - pd_naive.values).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(pd.values.cols(), 1);
  }
}

TEST(Ice, KnownLedgerCounts) {
  Rng rng(3);
  const Dataset train = testing::RandomDataset(rng, 100, 2);
  const Matrix inference = testing::RandomMatrix(rng, 10, 2);
  const GridSpec grid = BuildGrid(inference.col(0), 5, GridStrategy::kUniform, 0);
  const ReferencePredictor a, b;
  Ice(a, train, inference, grid);
  IceNaive(b, train, inference, grid);
  EXPECT_EQ(a.ledger().Snapshot().token_connections, 9950u);
  EXPECT_EQ(b.ledger().Snapshot().token_connections, 29750u);
}

TEST(Ice, MemoryGuardSplitsIntoFewestChunks) {
  Rng rng(8);
  const Dataset train = testing::RandomDataset(rng, 20, 2);
  const Matrix inference = testing::RandomMatrix(rng, 10, 2);
  const GridSpec grid = BuildGrid(inference.col(0), 7, GridStrategy::kUniform, 0);
  const ReferencePredictor chunked, whole;
  const EffectCurve a = Ice(chunked, train, inference, grid, {.max_batch_rows = 32});
  const EffectCurve b = Ice(whole, train, inference, grid);
  EXPECT_EQ(a.values, b.values);
  // 70 rows in chunks of 32: 32 + 32 + 6.
  EXPECT_EQ(chunked.ledger().Snapshot(),
            (LedgerSnapshot{2 * TokenCost(20, 32) + TokenCost(20, 6), 3}));
}

TEST(PartialDependence, ConstantPredictorIsFlat) {
  const testing::FunctionPredictor model([](const Eigen::RowVectorXd&) { return 0.3; });
  Rng rng(9);
  const Dataset train = testing::RandomDataset(rng, 5, 2);
  const Matrix inference = testing::RandomMatrix(rng, 8, 2);
  const EffectCurve pd =
      PartialDependence(model, train, inference, BuildGrid(inference.col(0), 6, GridStrategy::kUniform));
  for (Eigen::Index g = 0; g < pd.values.rows(); ++g) EXPECT_NEAR(pd.values(g, 0), 0.3, 1e-15);
}

TEST(Ale, HandComputedInstance) {
  const testing::FunctionPredictor model(
      [](const Eigen::RowVectorXd& x) { return 0.1 * x[0] * x[0] + 0.05 * x[1] + 0.2; });
  const Dataset train(Rows({{0, 0}, {1, 1}}), Vec({0, 1}));
  const Matrix inference = Rows({{0.5, 0}, {1.0, 1}, {1.5, 2}});
  const GridSpec grid{.feature_index = 0, .points = {0, 1, 2}};
  const EffectCurve ale = Ale(model, train, inference, grid);
  ASSERT_EQ(ale.values.rows(), 3);
  EXPECT_NEAR(ale.values(0, 0), -0.35 / 3.0, 1e-14);
  EXPECT_NEAR(ale.values(1, 0), 0.1 - 0.35 / 3.0, 1e-14);
  EXPECT_NEAR(ale.values(2, 0), 0.4 - 0.35 / 3.0, 1e-14);
  EXPECT_EQ(ale.ale.bin_counts, (std::vector<Eigen::Index>{2, 1}));
  EXPECT_TRUE(ale.ale.empty_bins.empty());
  // Two bin-edge evaluations per row, one pass.
  EXPECT_EQ(model.ledger().Snapshot(), (LedgerSnapshot{TokenCost(2, 6), 1}));
}

TEST(Ale, EmptyBinsAndOutOfRangeRows) {
  const testing::FunctionPredictor model([](const Eigen::RowVectorXd& x) { return x[0]; });
  const Dataset train(Rows({{0}, {1}}), Vec({0, 1}));
  const Matrix inference = Rows({{0.0}, {0.5}, {2.5}, {9.0}});
  const GridSpec grid{.feature_index = 0, .points = {0, 1, 2, 3}};
  const EffectCurve ale = Ale(model, train, inference, grid);
  EXPECT_EQ(ale.ale.bin_counts, (std::vector<Eigen::Index>{2, 0, 1}));
  EXPECT_EQ(ale.ale.empty_bins, (std::vector<Eigen::Index>{1}));
  EXPECT_EQ(ale.ale.rows_outside_grid, 1);
  // Local effects 1, 0, 1 -> accumulated 0, 1, 1, 2; centering weights the
  // two non-empty bins by their counts.
  const double mean = (2 * 0.5 + 1 * 1.5) / 3.0;
  EXPECT_NEAR(ale.values(0, 0), -mean, 1e-14);
  EXPECT_NEAR(ale.values(2, 0), 1 - mean, 1e-14);
  EXPECT_NEAR(ale.values(3, 0), 2 - mean, 1e-14);
}

TEST(Ale, LinearModelRecoversSlope) {
  const testing::FunctionPredictor model(
      [](const Eigen::RowVectorXd& x) { return 0.25 * x[1] + 0.1 * x[0]; });
  Rng rng(12);
  const Dataset train = testing::RandomDataset(rng, 4, 2);
  const Matrix inference = testing::RandomMatrix(rng, 50, 2);
  const GridSpec grid = BuildGrid(inference.col(1), 8, GridStrategy::kQuantile, 1);
  const EffectCurve ale = Ale(model, train, inference, grid);
  for (std::size_t k = 1; k < grid.points.size(); ++k)
    EXPECT_NEAR(ale.values(Eigen::Index(k), 0) - ale.values(Eigen::Index(k) - 1, 0),
                0.25 * (grid.points[k] - grid.points[k - 1]), 1e-12);
}

}  // namespace
}  // namespace ctximl
