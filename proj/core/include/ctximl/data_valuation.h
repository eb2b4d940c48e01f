#ifndef CTXIML_DATA_VALUATION_H_
#define CTXIML_DATA_VALUATION_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "ctximl/cost.h"
#include "ctximl/dataset.h"
#include "ctximl/predictor.h"
#include "ctximl/risk.h"

namespace ctximl {

enum class DataValueMethod { kLoo, kDataShapley, kSensitivity };
std::string_view DataValueMethodName(DataValueMethod method);

struct DataValueReport {
  Vector values;  // one per training row
  DataValueMethod method = DataValueMethod::kLoo;
  RiskKind risk_kind = RiskKind::kLogLoss;
  double baseline_risk = 0.0;
  double condition_number = 1.0;  // data Shapley only
  LedgerSnapshot cost;
};

// value_i = R(context without row i) - R(full context); positive means the
// row was helping. n_train + 1 forward passes.
DataValueReport Loo(const Predictor& predictor, const Dataset& train, const Dataset& validation,
                    RiskKind kind);

enum class ObservationWeighting { kUniform, kKernel };

struct ContextConfig {
  int num_subsets = 0;       // M, at least n_train
  int context_size = 0;      // n_sub
  int min_subset_size = 0;   // smallest sampled subset
  std::uint64_t seed = 0;
  RiskKind risk = RiskKind::kLogLoss;
  ObservationWeighting weighting = ObservationWeighting::kUniform;
};

// Smallest sampled subset for a context of `context_size` rows:
// max(8, context_size / 4).
int DefaultMinSubsetSize(int context_size);

struct ObservationSurrogate {
  Vector coefficients;  // one per training row
  double intercept = 0.0;
  double condition_number = 1.0;
  bool ridge_fallback = false;
  double tie_tolerance = 0.0;
};

struct ContextSelection {
  ObservationSubset selected;
  Vector coefficients;
  double intercept = 0.0;
  ContextConfig config;
  Eigen::Index validation_rows = 0;
  double condition_number = 1.0;
  bool ridge_fallback = false;
  LedgerSnapshot cost;
};

// Evaluates the validation risk of each training subset (one forward pass
// each) and regresses it on the membership indicators with an intercept
// and no efficiency constraint.
ObservationSurrogate FitObservationSurrogate(const Predictor& predictor, const Dataset& train,
                                             const Dataset& validation,
                                             const std::vector<ObservationSubset>& subsets,
                                             RiskKind kind, ObservationWeighting weighting);

// Samples M subsets with sizes uniform on [min_subset_size, context_size],
// fits the observation surrogate and keeps the context_size rows with the
// lowest coefficients. Throws ContractError("underdetermined surrogate")
// when M < n_train.
ContextSelection DataShapleyContext(const Predictor& predictor, const Dataset& train,
                                    const Dataset& validation, const ContextConfig& config);

// The `count` lowest coefficients; coefficients closer than `tie_tolerance`
// count as equal and ties go to the lower row index.
ObservationSubset SelectLowest(const Vector& coefficients, int count, double tie_tolerance = 0.0);

// Random sketch: `count` rows drawn uniformly without replacement.
ObservationSubset RandomSketch(Eigen::Index n_train, int count, std::uint64_t seed);

// ||d R / d (x_i, y_i)||_2 for every training row. Requires a
// DifferentiablePredictor ("sensitivity unsupported" otherwise) and a
// differentiable risk.
DataValueReport SensitivityDataValues(const Predictor& predictor, const Dataset& train,
                                      const Dataset& validation, RiskKind kind);

// |d f(x*_i) / d x*_ij| as a p x n_inf matrix.
Matrix SensitivityFeatureEffects(const Predictor& predictor, const Dataset& train,
                                 const Matrix& inference);

}  // namespace ctximl

#endif  // CTXIML_DATA_VALUATION_H_
