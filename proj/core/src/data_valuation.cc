#include "ctximl/data_valuation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ctximl/errors.h"
#include "ctximl/rng.h"
#include "ctximl/surrogate.h"

namespace ctximl {
namespace {

enum StreamPurpose : std::uint64_t { kSubsetSize = 11, kSubsetMembers = 12, kSketch = 13 };

const DifferentiablePredictor& RequireGradients(const Predictor& predictor) {
  const auto* diff = dynamic_cast<const DifferentiablePredictor*>(&predictor);
  if (!diff) throw ContractError("sensitivity unsupported");
  return *diff;
}

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::string_view DataValueMethodName(DataValueMethod method) {
  switch (method) {
    case DataValueMethod::kLoo:
      return "loo";
    case DataValueMethod::kDataShapley:
      return "data_shapley";
    case DataValueMethod::kSensitivity:
      return "sensitivity";
  }
  return "unknown";
}

int DefaultMinSubsetSize(int context_size) { return std::max(8, context_size / 4); }

DataValueReport Loo(const Predictor& predictor, const Dataset& train, const Dataset& validation,
                    RiskKind kind) {
  if (train.rows() < 2) throw ContractError("loo: need at least two training rows");
  if (validation.empty()) throw ContractError("loo: empty validation set");
  const LedgerSnapshot before = predictor.ledger().Snapshot();

  DataValueReport report;
  report.method = DataValueMethod::kLoo;
  report.risk_kind = kind;
  report.baseline_risk =
      EmpiricalRisk(predictor.Predict(train, validation.features()), validation.labels(), kind);
  report.values.resize(train.rows());
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    ObservationSubset keep = ObservationSubset::Full(static_cast<std::size_t>(train.rows()));
    keep.Set(static_cast<std::size_t>(i), false);
    const Dataset reduced = RestrictObservations(train, keep);
    report.values[i] =
        EmpiricalRisk(predictor.Predict(reduced, validation.features()), validation.labels(),
                      kind) -
        report.baseline_risk;
  }
  report.cost = predictor.ledger().Snapshot() - before;
  return report;
}

ObservationSurrogate FitObservationSurrogate(const Predictor& predictor, const Dataset& train,
                                             const Dataset& validation,
                                             const std::vector<ObservationSubset>& subsets,
                                             RiskKind kind, ObservationWeighting weighting) {
  const Eigen::Index n = train.rows();
  const auto m = static_cast<Eigen::Index>(subsets.size());
  if (validation.empty()) throw ContractError("data shapley: empty validation set");

  // Column 0 is the intercept, column i + 1 the membership of row i.
  Matrix design = Matrix::Zero(m, n + 1);
  Matrix risk(m, 1);
  Vector weights = Vector::Ones(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    const ObservationSubset& subset = subsets[static_cast<std::size_t>(s)];
    if (static_cast<Eigen::Index>(subset.size()) != n)
      throw ContractError("data shapley: subset mask length does not match n_train");
    design(s, 0) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) design(s, i + 1) = subset[static_cast<std::size_t>(i)];
    risk(s, 0) = EmpiricalRisk(
        predictor.Predict(RestrictObservations(train, subset), validation.features()),
        validation.labels(), kind);
    if (weighting == ObservationWeighting::kKernel) {
      const auto size = static_cast<int>(subset.Count());
      if (size == 0 || size == n)
        throw ContractError("data shapley: kernel weighting excludes boundary subsets");
      // log of (n - 1) / (C(n, s) s (n - s)); rescaled below.
      weights[s] = std::log(static_cast<double>(n - 1)) - LogBinomial(static_cast<int>(n), size) -
                   std::log(static_cast<double>(size) * static_cast<double>(n - size));
    }
  }
  if (weighting == ObservationWeighting::kKernel && m > 0) {
    const double top = weights.maxCoeff();
    weights = (weights.array() - top).exp().matrix();
  }

  const WlsFit fit = WeightedLeastSquares(design, weights, risk, {.allow_ridge_fallback = true});
  ObservationSurrogate out;
  out.intercept = fit.coefficients(0, 0);
  out.coefficients = fit.coefficients.col(0).tail(n);
  out.condition_number = fit.condition_number;
  out.ridge_fallback = fit.ridge_fallback;
  out.tie_tolerance = 1e-10 * std::max(1.0, risk.cwiseAbs().maxCoeff());
  return out;
}

ObservationSubset SelectLowest(const Vector& coefficients, int count, double tie_tolerance) {
  const Eigen::Index n = coefficients.size();
  if (count < 0 || count > n) throw ContractError("select: count out of range");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> key(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    key[std::size_t(i)] =
        tie_tolerance > 0.0 ? std::round(coefficients[i] / tie_tolerance) : coefficients[i];
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return key[std::size_t(a)] < key[std::size_t(b)];
  });
  ObservationSubset selected(static_cast<std::size_t>(n));
  for (int k = 0; k < count; ++k) selected.Set(static_cast<std::size_t>(order[std::size_t(k)]));
  return selected;
}

ObservationSubset RandomSketch(Eigen::Index n_train, int count, std::uint64_t seed) {
  Rng rng = Rng::Stream(seed, 0, kSketch);
  return ObservationSubset::FromIndices(
      rng.SampleWithoutReplacement(static_cast<std::size_t>(n_train),
                                   static_cast<std::size_t>(count)),
      static_cast<std::size_t>(n_train));
}

ContextSelection DataShapleyContext(const Predictor& predictor, const Dataset& train,
                                    const Dataset& validation, const ContextConfig& config) {
  const Eigen::Index n = train.rows();
  if (config.num_subsets < n) throw ContractError("underdetermined surrogate");
  if (config.min_subset_size < 1 || config.min_subset_size >= config.context_size ||
      config.context_size >= n)
    throw ContractError("data shapley: need 1 <= size_min < n_sub < n_train");
  const LedgerSnapshot before = predictor.ledger().Snapshot();

  std::vector<ObservationSubset> subsets;
  subsets.reserve(static_cast<std::size_t>(config.num_subsets));
  const auto span =
      static_cast<std::uint64_t>(config.context_size - config.min_subset_size + 1);
  for (int s = 0; s < config.num_subsets; ++s) {
    Rng size_rng = Rng::Stream(config.seed, static_cast<std::uint64_t>(s), kSubsetSize);
    const auto size =
        static_cast<std::size_t>(config.min_subset_size) + size_rng.UniformIndex(span);
    Rng member_rng = Rng::Stream(config.seed, static_cast<std::uint64_t>(s), kSubsetMembers);
    subsets.push_back(ObservationSubset::FromIndices(
        member_rng.SampleWithoutReplacement(static_cast<std::size_t>(n), size),
        static_cast<std::size_t>(n)));
  }

  const ObservationSurrogate fit =
      FitObservationSurrogate(predictor, train, validation, subsets, config.risk,
                              config.weighting);
  ContextSelection selection;
  selection.coefficients = fit.coefficients;
  selection.intercept = fit.intercept;
  selection.selected = SelectLowest(fit.coefficients, config.context_size, fit.tie_tolerance);
  selection.config = config;
  selection.validation_rows = validation.rows();
  selection.condition_number = fit.condition_number;
  selection.ridge_fallback = fit.ridge_fallback;
  selection.cost = predictor.ledger().Snapshot() - before;
  return selection;
}

DataValueReport SensitivityDataValues(const Predictor& predictor, const Dataset& train,
                                      const Dataset& validation, RiskKind kind) {
  const DifferentiablePredictor& diff = RequireGradients(predictor);
  if (!IsDifferentiable(kind)) throw ContractError("non-differentiable risk");
  const LedgerSnapshot before = predictor.ledger().Snapshot();

  DataValueReport report;
  report.method = DataValueMethod::kSensitivity;
  report.risk_kind = kind;
  const Vector pred = diff.Predict(train, validation.features()).probabilities;
  report.baseline_risk = EmpiricalRisk(pred, validation.labels(), kind);
  const Vector upstream = RiskDerivative(pred, validation.labels(), kind);
  report.values.resize(train.rows());
  for (Eigen::Index i = 0; i < train.rows(); ++i)
    report.values[i] =
        ChainTrainRowGradient(diff, train, validation.features(), upstream, i).norm();
  report.cost = predictor.ledger().Snapshot() - before;
  return report;
}

Matrix SensitivityFeatureEffects(const Predictor& predictor, const Dataset& train,
                                 const Matrix& inference) {
  const DifferentiablePredictor& diff = RequireGradients(predictor);
  return diff.InputGradient(train, inference).cwiseAbs().transpose();
}

}  // namespace ctximl
