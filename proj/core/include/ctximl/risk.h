#ifndef CTXIML_RISK_H_
#define CTXIML_RISK_H_

#include <optional>
#include <string>
#include <string_view>

#include "ctximl/dataset.h"
#include "ctximl/predictor.h"

namespace ctximl {

enum class RiskKind { kLogLoss, kBrier, kOneMinusAuc };

// Probability clamp used by the log loss.
inline constexpr double kLogLossEpsilon = 1e-12;

std::string_view RiskName(RiskKind kind);
std::optional<RiskKind> ParseRiskKind(std::string_view name);
bool IsDifferentiable(RiskKind kind);

// Mean loss over observations (log_loss, brier) or 1 - ROC AUC.
// Throws ContractError on length mismatch, empty input or, for
// one_minus_auc, single-class labels ("degenerate labels").
double EmpiricalRisk(const Vector& predictions, const Vector& labels, RiskKind kind);
inline double EmpiricalRisk(const PredictionBatch& predictions, const Vector& labels,
                            RiskKind kind) {
  return EmpiricalRisk(predictions.probabilities, labels, kind);
}

// Area under the ROC curve with midrank tie handling.
double RocAuc(const Vector& scores, const Vector& labels);

// d risk / d prediction_k. Throws ContractError("non-differentiable risk")
// for one_minus_auc.
Vector RiskDerivative(const Vector& predictions, const Vector& labels, RiskKind kind);

// Gradient of the empirical risk on `inference` with respect to training
// row `row` (features then relaxed label; length p + 1).
Vector RiskGradientWrtTrainRow(const DifferentiablePredictor& predictor, const Dataset& train,
                               const Dataset& inference, RiskKind kind, Eigen::Index row);

// Same as above with the upstream derivative dR/dp_hat supplied directly.
Vector ChainTrainRowGradient(const DifferentiablePredictor& predictor, const Dataset& train,
                             const Matrix& inference, const Vector& upstream, Eigen::Index row);

// RiskGradientWrtTrainRow on the kernel predictor with the given bandwidth.
Vector ReferenceGradientWrtTrain(const Dataset& train, const Dataset& inference, RiskKind kind,
                                 Eigen::Index row, double bandwidth);

}  // namespace ctximl

#endif  // CTXIML_RISK_H_
