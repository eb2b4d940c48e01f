#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "ctximl/cost.h"
#include "ctximl/data_valuation.h"
#include "ctximl/errors.h"
#include "ctximl/reference_predictor.h"
#include "ctximl/risk.h"
#include "test_util.h"

namespace ctximl {
namespace {

using testing::Rows;
using testing::Vec;

std::vector<double> Ranks(const Vector& v) {
  std::vector<Eigen::Index> order(std::size_t(v.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) r[std::size_t(order[k])] = double(k);
  return r;
}

double Spearman(const Vector& a, const Vector& b) {
  const auto ra = Ranks(a);
  const auto rb = Ranks(b);
  const double n = double(ra.size());
  const double mean = (n - 1) / 2;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - mean) * (rb[i] - mean);
    da += (ra[i] - mean) * (ra[i] - mean);
    db += (rb[i] - mean) * (rb[i] - mean);
  }
  return num / std::sqrt(da * db);
}

TEST(Loo, MatchesHighPrecisionOracle) {
  const Dataset train(Rows({{0, 0}, {1, 1}}), Vec({0, 1}));
  const Dataset val(Rows({{0.2, 0.1}, {0.9, 0.8}, {0.5, 0.6}}), Vec({0, 1, 0}));
  const ReferencePredictor model;
  const DataValueReport r = Loo(model, train, val, RiskKind::kLogLoss);
  EXPECT_NEAR(r.baseline_risk, 0.4129912297394978829, 1e-14);
  EXPECT_NEAR(r.values[0], 18.007689514213200923, 1e-10);
  EXPECT_NEAR(r.values[1], 8.7973491422373515198, 1e-10);
  EXPECT_EQ(r.cost.evaluation_calls, 3u);
}

TEST(Loo, DistantRowHasNoValue) {
  Rng rng(51);
  Dataset base = testing::RandomDataset(rng, 20, 2);
  Matrix x = base.features();
  x.row(7) << 500.0, 500.0;
  const Dataset train(x, base.labels());
  const Dataset val = testing::RandomDataset(rng, 15, 2);
  const ReferencePredictor model;
  const DataValueReport r = Loo(model, train, val, RiskKind::kBrier);
  EXPECT_EQ(r.values[7], 0.0);
  EXPECT_EQ(r.cost.evaluation_calls, 21u);
  EXPECT_EQ(r.cost.token_connections, TokenCost(20, 15) + 20 * TokenCost(19, 15));
}

TEST(DataShapley, ChargesOnePassPerSubset) {
  Rng rng(52);
  const Dataset train = testing::RandomDataset(rng, 24, 3);
  const Dataset val = testing::RandomDataset(rng, 10, 3);
  const ReferencePredictor model;
  const ContextConfig config{.num_subsets = 60, .context_size = 12, .min_subset_size = 4,
                             .seed = 3};
  const ContextSelection sel = DataShapleyContext(model, train, val, config);
  EXPECT_EQ(sel.cost.evaluation_calls, 60u);
  EXPECT_EQ(sel.selected.Count(), 12u);
  EXPECT_GE(sel.cost.token_connections, 60 * TokenCost(4, 10));
  EXPECT_LE(sel.cost.token_connections, 60 * TokenCost(12, 10));
  EXPECT_EQ(sel.validation_rows, 10);
}

TEST(DataShapley, LedgerMatchesSubsetSizes) {
  Rng rng(53);
  const Dataset train = testing::RandomDataset(rng, 12, 2);
  const Dataset val = testing::RandomDataset(rng, 7, 2);
  std::vector<ObservationSubset> subsets;
  std::uint64_t expected = 0;
  for (std::uint64_t mask = 1; mask < 40; ++mask) {
    subsets.push_back(ObservationSubset::FromMask(mask * 97 + 5, 12));
    expected += TokenCost(subsets.back().Count(), 7);
  }
  const ReferencePredictor model;
  FitObservationSurrogate(model, train, val, subsets, RiskKind::kLogLoss,
                          ObservationWeighting::kUniform);
  EXPECT_EQ(model.ledger().Snapshot().token_connections, expected);
  EXPECT_EQ(model.ledger().Snapshot().evaluation_calls, 39u);
}

TEST(DataShapley, RejectsUnderdeterminedSurrogate) {
  Rng rng(54);
  const Dataset train = testing::RandomDataset(rng, 30, 2);
  const Dataset val = testing::RandomDataset(rng, 5, 2);
  const ReferencePredictor model;
  try {
    DataShapleyContext(model, train, val, {.num_subsets = 29, .context_size = 10,
                                           .min_subset_size = 4});
    FAIL() << "expected ContractError";
  } catch (const ContractError& e) {
    EXPECT_STREQ(e.what(), "underdetermined surrogate");
  }
  EXPECT_EQ(model.ledger().Snapshot().evaluation_calls, 0u);
}

TEST(DataShapley, TiesGoToLowestIndex) {
  EXPECT_EQ(SelectLowest(Vec({1, 0, 0, 0, 2}), 2).Indices(), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(SelectLowest(Vec({0.5, 0.5 + 1e-13, 0.5 - 1e-13, 0}), 2, 1e-10).Indices(),
            (std::vector<std::size_t>{0, 3}));

  // Identical rows get identical coefficients up to round-off.
  Matrix x(16, 2);
  Vector y(16);
  for (Eigen::Index i = 0; i < 16; ++i) {
    x.row(i) << (i < 8 ? 0.3 : double(i)), (i < 8 ? -0.2 : double(i % 3));
    y[i] = i < 8 ? 1.0 : double(i % 2);
  }
  const Dataset train(x, y);
  const Dataset val(Rows({{0.3, -0.2}, {0.2, -0.1}, {9, 0}}), Vec({1, 1, 0}));
  const ReferencePredictor model;
  const ContextSelection sel = DataShapleyContext(
      model, train, val, {.num_subsets = 200, .context_size = 4, .min_subset_size = 2, .seed = 1});
  const auto idx = sel.selected.Indices();
  if (idx.front() < 8) {
    EXPECT_EQ(std::count_if(idx.begin(), idx.end(), [](auto i) { return i < 8; }),
              std::ptrdiff_t(std::min<std::size_t>(idx.size(), 8)));
  }
}

TEST(DataShapley, Deterministic) {
  Rng rng(55);
  const Dataset train = testing::RandomDataset(rng, 20, 3);
  const Dataset val = testing::RandomDataset(rng, 10, 3);
  const ReferencePredictor model;
  const ContextConfig config{.num_subsets = 40, .context_size = 8, .min_subset_size = 3,
                             .seed = 9};
  const ContextSelection a = DataShapleyContext(model, train, val, config);
  const ContextSelection b = DataShapleyContext(model, train, val, config);
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_EQ(a.selected, b.selected);
  EXPECT_EQ(RandomSketch(20, 8, 4), RandomSketch(20, 8, 4));
  EXPECT_EQ(RandomSketch(20, 8, 4).Count(), 8u);
}

TEST(DataShapley, ExhaustiveSurrogateAgreesWithLoo) {
  Rng rng(56);
  const Dataset train = testing::RandomDataset(rng, 8, 2);
  const Dataset val = testing::RandomDataset(rng, 30, 2);
  std::vector<ObservationSubset> subsets;
  for (std::uint64_t mask = 1; mask + 1 < (1u << 8); ++mask)
    subsets.push_back(ObservationSubset::FromMask(mask, 8));
  const ReferencePredictor model;
  const ObservationSurrogate fit = FitObservationSurrogate(
      model, train, val, subsets, RiskKind::kBrier, ObservationWeighting::kKernel);
  const DataValueReport loo = Loo(model, train, val, RiskKind::kBrier);
  EXPECT_FALSE(fit.ridge_fallback);
  EXPECT_GT(Spearman(loo.values, -fit.coefficients), 0.8);
}

TEST(DataShapley, FlippedLabelRanksAmongMostHarmful) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(600 + seed);
    Matrix x = testing::RandomMatrix(rng, 60, 2);
    Vector y(60);
    for (Eigen::Index i = 0; i < 60; ++i) y[i] = x(i, 0) > 0 ? 1.0 : 0.0;
    Eigen::Index flip = 0;
    for (Eigen::Index i = 0; i < 60; ++i)
      if (std::abs(x(i, 0)) > std::abs(x(flip, 0)) && std::abs(x(i, 0)) < 1.0) flip = i;
    y[flip] = 1.0 - y[flip];
    const Dataset train(x, y);
    Matrix xv = testing::RandomMatrix(rng, 40, 2);
    Vector yv(40);
    for (Eigen::Index i = 0; i < 40; ++i) yv[i] = xv(i, 0) > 0 ? 1.0 : 0.0;
    const ReferencePredictor model;
    const ContextSelection sel = DataShapleyContext(
        model, train, Dataset(xv, yv),
        {.num_subsets = 600, .context_size = 30, .min_subset_size = 8, .seed = seed});
    int above = 0;
    for (Eigen::Index i = 0; i < 60; ++i) above += sel.coefficients[i] > sel.coefficients[flip];
    hits += above < 6;
  }
  EXPECT_GE(hits, 4);
}

TEST(Sensitivity, MatchesFiniteDifferences) {
  Rng rng(57);
  const Dataset train = testing::RandomDataset(rng, 12, 3);
  const Dataset val = testing::RandomDataset(rng, 9, 3);
  const ReferencePredictor model;
  for (RiskKind kind : {RiskKind::kLogLoss, RiskKind::kBrier}) {
    const DataValueReport r = SensitivityDataValues(model, train, val, kind);
    EXPECT_EQ(r.cost.evaluation_calls, 1u);
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      auto risk = [&](const Matrix& x, const Vector& y) {
        return EmpiricalRisk(ReferencePredict(x, y, val.features(), 1.0), val.labels(), kind);
      };
      Vector grad(4);
      const double h = 1e-6;
      for (Eigen::Index c = 0; c < 4; ++c) {
        Matrix xp = train.features(), xm = train.features();
        Vector yp = train.labels(), ym = train.labels();
        if (c < 3) {
          xp(i, c) += h;
          xm(i, c) -= h;
        } else {
          yp[i] += h;
          ym[i] -= h;
        }
        grad[c] = (risk(xp, yp) - risk(xm, ym)) / (2 * h);
      }
      EXPECT_TRUE(testing::RelClose(r.values[i], grad.norm(), 1e-4))
          << RiskName(kind) << " row " << i << ": " << r.values[i] << " vs " << grad.norm();
    }
  }
}

TEST(Sensitivity, FeatureEffectsShape) {
  Rng rng(58);
  const Dataset train = testing::RandomDataset(rng, 12, 3);
  const Matrix inf = testing::RandomMatrix(rng, 5, 3);
  const ReferencePredictor model;
  const Matrix e = SensitivityFeatureEffects(model, train, inf);
  EXPECT_EQ(e.rows(), 3);
  EXPECT_EQ(e.cols(), 5);
  EXPECT_GE(e.minCoeff(), 0.0);
}

TEST(Sensitivity, RequiresGradients) {
  Rng rng(59);
  const Dataset train = testing::RandomDataset(rng, 6, 2);
  const testing::FunctionPredictor f([](const Eigen::RowVectorXd&) { return 0.5; });
  try {
    SensitivityDataValues(f, train, train, RiskKind::kLogLoss);
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_STREQ(e.what(), "sensitivity unsupported");
  }
  const ReferencePredictor model;
  EXPECT_THROW(SensitivityDataValues(model, train, train, RiskKind::kOneMinusAuc), ContractError);
}

}  // namespace
}  // namespace ctximl
