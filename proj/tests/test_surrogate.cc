#include <gtest/gtest.h>

#include "ctximl/errors.h"
#include "ctximl/shapley.h"
#include "ctximl/surrogate.h"
#include "test_util.h"

namespace ctximl {
namespace {

using testing::Rows;
using testing::Vec;

TEST(WeightedLeastSquares, RecoversExactLinearModel) {
  Rng rng(1);
  const Matrix a = testing::RandomMatrix(rng, 30, 4);
  const Vector beta = Vec({1.5, -2, 0.25, 3});
  Matrix b(30, 1);
  b.col(0) = a * beta;
  const Vector w = Vector::LinSpaced(30, 0.5, 3.0);
  const WlsFit fit = WeightedLeastSquares(a, w, b);
  EXPECT_LE((fit.coefficients.col(0) - beta).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(fit.rank, 4);
  EXPECT_FALSE(fit.ridge_fallback);
}

TEST(WeightedLeastSquares, WeightsMatterForInconsistentSystems) {
  // One unknown, observations 0 and 1: the weighted mean is the answer.
  const Matrix a = Rows({{1}, {1}});
  Matrix b(2, 1);
  b << 0, 1;
  EXPECT_NEAR(WeightedLeastSquares(a, Vec({3, 1}), b).coefficients(0, 0), 0.25, 1e-15);
}

TEST(WeightedLeastSquares, RankDeficiencyNamesColumnsOrFallsBack) {
  const Matrix a = Rows({{1, 1, 0}, {2, 2, 1}, {0, 0, 1}, {3, 3, 2}});
  Matrix b(4, 1);
  b << 1, 2, 3, 4;
  try {
    WeightedLeastSquares(a, Vector::Ones(4), b);
    FAIL() << "expected RankDeficiencyError";
  } catch (const RankDeficiencyError& e) {
    EXPECT_EQ(e.columns(), (std::vector<Eigen::Index>{0, 1}));
  }
  const WlsFit ridge =
      WeightedLeastSquares(a, Vector::Ones(4), b, {.allow_ridge_fallback = true});
  EXPECT_TRUE(ridge.ridge_fallback);
  EXPECT_TRUE(ridge.coefficients.allFinite());
}

TEST(SolveWeightedSurrogate, ExactForAdditiveGames) {
  // v(S) = 0.1 + sum_{j in S} c_j for every coalition: the surrogate is exact.
  const Vector c = Vec({0.3, -0.2, 0.05, 0.4});
  const CoalitionPlan plan = PlanCoalitions(4, 14, 0);
  ASSERT_TRUE(plan.exhaustive);
  Matrix design(14, 4);
  Matrix values(14, 1);
  for (int m = 0; m < 14; ++m) {
    double v = 0.1;
    for (int j = 0; j < 4; ++j) {
      design(m, j) = plan.coalitions[std::size_t(m)][std::size_t(j)];
      v += design(m, j) * c[j];
    }
    values(m, 0) = v;
  }
  const SurrogateFit fit = SolveWeightedSurrogate(design, plan.weights, values, Vec({0.1}),
                                                  Vec({0.1 + c.sum()}));
  EXPECT_NEAR(fit.base_value[0], 0.1, 1e-15);
  EXPECT_LE((fit.phi.col(0) - c).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(fit.phi.sum(), c.sum(), 1e-14);
  EXPECT_GE(fit.condition_number, 1.0);
}

TEST(SolveWeightedSurrogate, EfficiencyHoldsUnderNoise) {
  Rng rng(4);
  const CoalitionPlan plan = PlanCoalitions(5, 12, 3);
  Matrix design(12, 5);
  Matrix values(12, 2);
  for (int m = 0; m < 12; ++m) {
    for (int j = 0; j < 5; ++j) design(m, j) = plan.coalitions[std::size_t(m)][std::size_t(j)];
    values(m, 0) = rng.Normal();
    values(m, 1) = rng.Normal();
  }
  const SurrogateFit fit =
      SolveWeightedSurrogate(design, plan.weights, values, Vec({0.2, -1}), Vec({0.7, 2}));
  EXPECT_NEAR(fit.phi.col(0).sum(), 0.5, 1e-12);
  EXPECT_NEAR(fit.phi.col(1).sum(), 3.0, 1e-12);
}

TEST(SolveWeightedSurrogate, RejectsBoundaryAndNonBinaryRows) {
  const Vector v = Vec({0});
  Matrix values = Matrix::Zero(1, 1);
  EXPECT_THROW(SolveWeightedSurrogate(Rows({{1, 1, 1}}), Vec({1}), values, v, v), ContractError);
  EXPECT_THROW(SolveWeightedSurrogate(Rows({{0, 0, 0}}), Vec({1}), values, v, v), ContractError);
  EXPECT_THROW(SolveWeightedSurrogate(Rows({{0.5, 1, 0}}), Vec({1}), values, v, v), ContractError);
}

TEST(SolveWeightedSurrogate, UnidentifiableFeaturesAreNamed) {
  // Features 0 and 1 always move together.
  const Matrix design = Rows({{1, 1, 0}, {0, 0, 1}, {1, 1, 0}});
  Matrix values(3, 1);
  values << 0.3, 0.2, 0.35;
  try {
    SolveWeightedSurrogate(design, Vector::Ones(3), values, Vec({0}), Vec({1}));
    FAIL() << "expected RankDeficiencyError";
  } catch (const RankDeficiencyError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient coalition diversity"), std::string::npos);
  }
}

}  // namespace
}  // namespace ctximl
