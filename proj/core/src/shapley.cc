#include "ctximl/shapley.h"

#include <cmath>
#include <string>

#include "ctximl/errors.h"
#include "ctximl/rng.h"

namespace ctximl {
namespace {

enum StreamPurpose : std::uint64_t { kCoalitionSize = 1, kCoalitionMembers = 2, kImputation = 3 };

double Binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void CheckCoalition(const FeatureSubset& subset, Eigen::Index p) {
  if (static_cast<Eigen::Index>(subset.size()) != p)
    throw ContractError("coalition mask length does not match feature count");
}

// Rows of `inference` with the columns outside `subset` copied from
// training row `donor`.
void FillHybrids(const Matrix& inference, const Matrix& train_x, const FeatureSubset& subset,
                 Eigen::Index donor, Matrix& out, Eigen::Index offset) {
  const Eigen::Index n = inference.rows();
  out.middleRows(offset, n) = inference;
  for (Eigen::Index j = 0; j < inference.cols(); ++j) {
    if (subset[static_cast<std::size_t>(j)]) continue;
    out.col(j).segment(offset, n).setConstant(train_x(donor, j));
  }
}

}  // namespace

double ShapKernelWeight(int p, int s) {
  if (p < 2) throw ContractError("shap kernel: need at least two players");
  if (s <= 0 || s >= p) throw ContractError("boundary coalition handled by constraint");
  return static_cast<double>(p - 1) / (Binomial(p, s) * s * (p - s));
}

RetrainMode RetrainMode::Approximate(int imputation_samples) {
  if (imputation_samples < 1)
    throw ContractError("approximate retraining needs at least one imputation sample");
  return RetrainMode(imputation_samples);
}

std::string RetrainMode::Describe() const {
  return is_exact() ? "exact_retrain" : "approx_retrain(" + std::to_string(imputation_samples_) + ")";
}

CoalitionPlan PlanCoalitions(int p, int num_coalitions, std::uint64_t seed) {
  if (p < 2) throw ContractError("sample_coalitions: need at least two features");
  CoalitionPlan plan;
  const bool can_enumerate = p < 63;
  const std::uint64_t non_boundary = can_enumerate ? (std::uint64_t{1} << p) - 2 : 0;
  if (num_coalitions < p + 1 &&
      !(can_enumerate && static_cast<std::uint64_t>(num_coalitions) >= non_boundary))
    throw ContractError("sample_coalitions: need at least p + 1 coalitions");
  if (can_enumerate && static_cast<std::uint64_t>(num_coalitions) >= non_boundary) {
    plan.exhaustive = true;
    plan.weights.resize(static_cast<Eigen::Index>(non_boundary));
    for (std::uint64_t mask = 1; mask <= non_boundary; ++mask) {
      FeatureSubset s = FeatureSubset::FromMask(mask, static_cast<std::size_t>(p));
      plan.weights[static_cast<Eigen::Index>(mask - 1)] =
          ShapKernelWeight(p, static_cast<int>(s.Count()));
      plan.coalitions.push_back(std::move(s));
    }
    return plan;
  }

  // Kernel mass per size: C(p, s) k(p, s) = (p - 1) / (s (p - s)).
  std::vector<double> cdf(static_cast<std::size_t>(p - 1));
  double total = 0.0;
  for (int s = 1; s < p; ++s) {
    total += 1.0 / (static_cast<double>(s) * (p - s));
    cdf[static_cast<std::size_t>(s - 1)] = total;
  }
  plan.weights = Vector::Ones(num_coalitions);
  for (int c = 0; c < num_coalitions; ++c) {
    Rng size_rng = Rng::Stream(seed, static_cast<std::uint64_t>(c), kCoalitionSize);
    const double u = size_rng.Uniform() * total;
    int size = 1;
    while (size < p - 1 && u >= cdf[static_cast<std::size_t>(size - 1)]) ++size;
    Rng member_rng = Rng::Stream(seed, static_cast<std::uint64_t>(c), kCoalitionMembers);
    plan.coalitions.push_back(FeatureSubset::FromIndices(
        member_rng.SampleWithoutReplacement(static_cast<std::size_t>(p),
                                            static_cast<std::size_t>(size)),
        static_cast<std::size_t>(p)));
  }
  return plan;
}

std::vector<FeatureSubset> SampleCoalitions(int p, int num_coalitions, std::uint64_t seed) {
  return PlanCoalitions(p, num_coalitions, seed).coalitions;
}

Vector ValueExactRetrain(const Predictor& predictor, const Dataset& train,
                         const Matrix& inference, const FeatureSubset& subset) {
  CheckCoalition(subset, train.cols());
  return predictor.Predict(RestrictFeatures(train, subset), RestrictColumns(inference, subset))
      .probabilities;
}

Vector ValueApproxRetrain(const Predictor& predictor, const Dataset& train,
                          const Matrix& inference, const FeatureSubset& subset,
                          int imputation_samples, std::uint64_t seed) {
  CheckCoalition(subset, train.cols());
  if (imputation_samples < 1 || imputation_samples > train.rows())
    throw ContractError("approximate retraining: L must lie in [1, n_train]");
  if (inference.cols() != train.cols())
    throw ContractError("approximate retraining: column-count mismatch");
  Rng rng = Rng::Stream(seed, 0, kImputation);
  const auto donors = rng.SampleWithoutReplacement(static_cast<std::size_t>(train.rows()),
                                                   static_cast<std::size_t>(imputation_samples));
  Vector sum = Vector::Zero(inference.rows());
  Matrix hybrids(inference.rows(), inference.cols());
  for (std::size_t donor : donors) {
    FillHybrids(inference, train.features(), subset, static_cast<Eigen::Index>(donor), hybrids, 0);
    sum += predictor.Predict(train, hybrids).probabilities;
  }
  return sum / static_cast<double>(imputation_samples);
}

double EmptyCoalitionValue(const Dataset& train, const std::optional<double>& empty_value) {
  return empty_value.value_or(train.PositiveRate());
}

CoalitionDesign EvaluateCoalitions(const Predictor& predictor, const Dataset& train,
                                   const Matrix& inference, const CoalitionPlan& plan,
                                   const KernelShapOptions& options) {
  const Eigen::Index p = train.cols();
  const Eigen::Index n_inf = inference.rows();
  const auto m = static_cast<Eigen::Index>(plan.coalitions.size());
  if (plan.weights.size() != m) throw ContractError("coalition plan: weight count mismatch");

  CoalitionDesign d;
  d.design = Matrix::Zero(m, p);
  d.weights = plan.weights;
  d.values = Matrix::Zero(m, n_inf);
  for (Eigen::Index c = 0; c < m; ++c) {
    const FeatureSubset& s = plan.coalitions[static_cast<std::size_t>(c)];
    CheckCoalition(s, p);
    for (Eigen::Index j = 0; j < p; ++j) d.design(c, j) = s[static_cast<std::size_t>(j)] ? 1 : 0;
  }

  if (options.mode.is_exact()) {
    for (Eigen::Index c = 0; c < m; ++c)
      d.values.row(c) =
          ValueExactRetrain(predictor, train, inference, plan.coalitions[std::size_t(c)])
              .transpose();
    return d;
  }

  const int l_count = options.mode.imputation_samples();
  if (l_count > train.rows())
    throw ContractError("approximate retraining: L must not exceed n_train");
  // Coalition c, imputation sample l occupies rows [(c L + l) n_inf, ... + n_inf).
  Matrix hybrids(m * l_count * n_inf, p);
  for (Eigen::Index c = 0; c < m; ++c) {
    Rng rng = Rng::Stream(options.seed, static_cast<std::uint64_t>(c), kImputation);
    const auto donors = rng.SampleWithoutReplacement(static_cast<std::size_t>(train.rows()),
                                                     static_cast<std::size_t>(l_count));
    for (int l = 0; l < l_count; ++l) {
      FillHybrids(inference, train.features(), plan.coalitions[std::size_t(c)],
                  static_cast<Eigen::Index>(donors[std::size_t(l)]), hybrids,
                  (c * l_count + l) * n_inf);
    }
  }
  const Vector flat = PredictChunked(predictor, train, hybrids, options.max_batch_rows);
  for (Eigen::Index c = 0; c < m; ++c) {
    Vector sum = Vector::Zero(n_inf);
    for (int l = 0; l < l_count; ++l) sum += flat.segment((c * l_count + l) * n_inf, n_inf);
    d.values.row(c) = (sum / static_cast<double>(l_count)).transpose();
  }
  return d;
}

AttributionResult KernelShap(const Predictor& predictor, const Dataset& train,
                             const Matrix& inference, const KernelShapOptions& options) {
  const int p = static_cast<int>(train.cols());
  if (p == 1) {
    // A single player needs no surrogate.
    CoalitionPlan empty_plan;
    empty_plan.exhaustive = true;
    return KernelShap(predictor, train, inference, empty_plan, options);
  }
  return KernelShap(predictor, train, inference,
                    PlanCoalitions(p, options.num_coalitions, options.seed), options);
}

AttributionResult KernelShap(const Predictor& predictor, const Dataset& train,
                             const Matrix& inference, const CoalitionPlan& plan,
                             const KernelShapOptions& options) {
  if (inference.cols() != train.cols()) throw ContractError("kernel shap: column-count mismatch");
  if (train.cols() < 1) throw ContractError("kernel shap: need at least one feature");
  const LedgerSnapshot before = predictor.ledger().Snapshot();

  const CoalitionDesign design = EvaluateCoalitions(predictor, train, inference, plan, options);
  const Vector v_full = predictor.Predict(train, inference).probabilities;
  const Vector v_empty =
      Vector::Constant(inference.rows(), EmptyCoalitionValue(train, options.empty_value));

  const SurrogateFit fit = SolveWeightedSurrogate(design.design, design.weights, design.values,
                                                  v_empty, v_full, options.solver);
  AttributionResult result;
  result.base_value = fit.base_value;
  result.phi = fit.phi;
  result.mode = options.mode;
  result.diagnostics.condition_number = fit.condition_number;
  result.diagnostics.num_coalitions = static_cast<int>(plan.coalitions.size());
  result.diagnostics.exhaustive = plan.exhaustive;
  result.diagnostics.ridge_fallback = fit.ridge_fallback;
  result.diagnostics.cost = predictor.ledger().Snapshot() - before;
  return result;
}

std::uint64_t KernelShapTokenBudget(std::uint64_t n_train, std::uint64_t n_inf,
                                    std::uint64_t num_coalitions, const RetrainMode& mode) {
  const std::uint64_t full = TokenCost(n_train, n_inf);
  if (mode.is_exact()) return num_coalitions * TokenCost(n_train, n_inf) + full;
  const auto l = static_cast<std::uint64_t>(mode.imputation_samples());
  return TokenCost(n_train, num_coalitions * l * n_inf) + full;
}

Matrix BruteForceShapley(int p, const std::function<Vector(std::uint64_t)>& value) {
  if (p < 1 || p > kMaxBruteForcePlayers)
    throw ContractError("brute-force Shapley supports 1 to " +
                        std::to_string(kMaxBruteForcePlayers) + " players");
  const std::uint64_t count = std::uint64_t{1} << p;
  std::vector<Vector> v(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) v[mask] = value(mask);
  const Eigen::Index targets = v[0].size();

  // |S|! (p - |S| - 1)! / p! = 1 / (p C(p - 1, |S|))
  std::vector<double> weight(static_cast<std::size_t>(p));
  for (int s = 0; s < p; ++s) weight[std::size_t(s)] = 1.0 / (p * Binomial(p - 1, s));

  Matrix phi = Matrix::Zero(p, targets);
  for (int j = 0; j < p; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      const int size = __builtin_popcountll(mask);
      phi.row(j) += weight[std::size_t(size)] * (v[mask | bit] - v[mask]).transpose();
    }
  }
  return phi;
}

Matrix ExactShapleyBruteforce(const Predictor& predictor, const Dataset& train,
                              const Matrix& inference, const std::optional<double>& empty_value) {
  const int p = static_cast<int>(train.cols());
  if (p > kMaxBruteForcePlayers)
    throw ContractError("exact Shapley: p = " + std::to_string(p) + " exceeds the guard of " +
                        std::to_string(kMaxBruteForcePlayers));
  if (inference.cols() != train.cols())
    throw ContractError("exact Shapley: column-count mismatch");
  const double base = EmptyCoalitionValue(train, empty_value);
  return BruteForceShapley(p, [&](std::uint64_t mask) -> Vector {
    if (mask == 0) return Vector::Constant(inference.rows(), base);
    return ValueExactRetrain(predictor, train, inference,
                             FeatureSubset::FromMask(mask, static_cast<std::size_t>(p)));
  });
}

Vector ExactShapleyBruteforce(const Predictor& predictor, const Dataset& train,
                              const Eigen::RowVectorXd& query,
                              const std::optional<double>& empty_value) {
  Matrix one = query;
  return ExactShapleyBruteforce(predictor, train, one, empty_value).col(0);
}

double ShapErrorMetric(const Matrix& estimate, const Matrix& exact) {
  if (estimate.rows() != exact.rows() || estimate.cols() != exact.cols())
    throw ContractError("shap error metric: shape mismatch");
  if (exact.cols() == 0) throw ContractError("shap error metric: no inference rows");
  return (estimate - exact).cwiseAbs().sum() / static_cast<double>(exact.cols());
}

}  // namespace ctximl
