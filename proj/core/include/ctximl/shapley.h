#ifndef CTXIML_SHAPLEY_H_
#define CTXIML_SHAPLEY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctximl/cost.h"
#include "ctximl/dataset.h"
#include "ctximl/predictor.h"
#include "ctximl/surrogate.h"

namespace ctximl {

// Shapley kernel (p - 1) / (C(p, s) s (p - s)) for 1 <= s <= p - 1.
double ShapKernelWeight(int p, int s);

// How coalition values are obtained. Exact retraining restricts the context
// and the queries to the coalition and runs one forward pass; approximate
// retraining imputes the absent features from L training rows and averages
// the full-feature model over them.
class RetrainMode {
 public:
  static RetrainMode Exact() { return RetrainMode(-1); }
  static RetrainMode Approximate(int imputation_samples);

  bool is_exact() const { return imputation_samples_ == -1; }
  // -1 for exact retraining, L >= 1 otherwise.
  int imputation_samples() const { return imputation_samples_; }
  std::string Describe() const;

  bool operator==(const RetrainMode&) const = default;

 private:
  explicit RetrainMode(int l) : imputation_samples_(l) {}
  int imputation_samples_;
};

struct CoalitionPlan {
  std::vector<FeatureSubset> coalitions;  // never empty or full
  Vector weights;                         // regression weight per coalition
  bool exhaustive = false;
};

// If M >= 2^p - 2 every non-boundary coalition appears once (ascending mask
// order) with its exact kernel weight. Otherwise M coalitions are drawn:
// size s with probability proportional to the kernel mass C(p,s) k(p,s),
// then a uniform subset of that size; duplicates allowed, equal weights.
// Requires p >= 2 and M >= p + 1 unless M already covers every coalition.
CoalitionPlan PlanCoalitions(int p, int num_coalitions, std::uint64_t seed);
std::vector<FeatureSubset> SampleCoalitions(int p, int num_coalitions, std::uint64_t seed);

// f_PFN(x*_S, D_S): one forward pass on the restricted context.
Vector ValueExactRetrain(const Predictor& predictor, const Dataset& train,
                         const Matrix& inference, const FeatureSubset& subset);

// (1/L) sum_l f_P((x*_S, x^{kappa(l)}_{S^C}), D_P) with kappa drawn without
// replacement; evaluated sequentially, one forward pass per imputation
// sample. Requires 1 <= L <= n_train.
Vector ValueApproxRetrain(const Predictor& predictor, const Dataset& train,
                          const Matrix& inference, const FeatureSubset& subset,
                          int imputation_samples, std::uint64_t seed);

struct CoalitionDesign {
  Matrix design;   // M x p, binary
  Vector weights;  // M
  Matrix values;   // M x n_inf
};

struct AttributionDiagnostics {
  double condition_number = 1.0;
  int num_coalitions = 0;
  bool exhaustive = false;
  bool ridge_fallback = false;
  LedgerSnapshot cost;
};

struct AttributionResult {
  Vector base_value;  // phi_0 per inference row
  Matrix phi;         // p x n_inf
  RetrainMode mode = RetrainMode::Exact();
  AttributionDiagnostics diagnostics;
};

struct KernelShapOptions {
  int num_coalitions = 0;
  RetrainMode mode = RetrainMode::Exact();
  std::uint64_t seed = 0;
  // Value of the empty coalition; defaults to the training base rate.
  std::optional<double> empty_value;
  // Row budget per forward pass for approximate retraining, which packs all
  // M * L * n_inf hybrid rows into as few passes as this allows.
  Eigen::Index max_batch_rows = Eigen::Index{1} << 20;
  WlsOptions solver{.allow_ridge_fallback = true};
};

double EmptyCoalitionValue(const Dataset& train, const std::optional<double>& empty_value);

// Evaluates the game for every coalition of `plan`.
CoalitionDesign EvaluateCoalitions(const Predictor& predictor, const Dataset& train,
                                   const Matrix& inference, const CoalitionPlan& plan,
                                   const KernelShapOptions& options);

AttributionResult KernelShap(const Predictor& predictor, const Dataset& train,
                             const Matrix& inference, const KernelShapOptions& options);
AttributionResult KernelShap(const Predictor& predictor, const Dataset& train,
                             const Matrix& inference, const CoalitionPlan& plan,
                             const KernelShapOptions& options);

// Token connections charged by KernelShap: M passes of TokenCost(n_train,
// n_inf) for exact retraining, TokenCost(n_train, M L n_inf) for approximate
// retraining in a single pass; plus the full-feature pass in both cases.
std::uint64_t KernelShapTokenBudget(std::uint64_t n_train, std::uint64_t n_inf,
                                    std::uint64_t num_coalitions, const RetrainMode& mode);

inline constexpr int kMaxBruteForcePlayers = 20;

// Shapley values of an arbitrary game over p players. `value(mask)` returns
// one payoff per target; it is called exactly once per mask, including the
// empty mask 0. Returns p x n_targets.
Matrix BruteForceShapley(int p, const std::function<Vector(std::uint64_t)>& value);

// Exact Shapley values of the exact-retraining game by full enumeration of
// all 2^p coalitions; p x n_inf.
Matrix ExactShapleyBruteforce(const Predictor& predictor, const Dataset& train,
                              const Matrix& inference,
                              const std::optional<double>& empty_value = std::nullopt);
Vector ExactShapleyBruteforce(const Predictor& predictor, const Dataset& train,
                              const Eigen::RowVectorXd& query,
                              const std::optional<double>& empty_value = std::nullopt);

// (1 / n_inf) sum_i sum_j |phi_ji - phi_hat_ji|.
double ShapErrorMetric(const Matrix& estimate, const Matrix& exact);
inline double ShapErrorMetric(const AttributionResult& estimate, const Matrix& exact) {
  return ShapErrorMetric(estimate.phi, exact);
}

}  // namespace ctximl

#endif  // CTXIML_SHAPLEY_H_
