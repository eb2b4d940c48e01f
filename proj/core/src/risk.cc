#include "ctximl/risk.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ctximl/errors.h"
#include "ctximl/reference_predictor.h"

namespace ctximl {
namespace {

void CheckLengths(const Vector& predictions, const Vector& labels) {
  if (predictions.size() != labels.size())
    throw ContractError("empirical risk: predictions and labels differ in length");
  if (labels.size() == 0) throw ContractError("empirical risk: no observations");
}

}  // namespace

std::string_view RiskName(RiskKind kind) {
  switch (kind) {
    case RiskKind::kLogLoss:
      return "log_loss";
    case RiskKind::kBrier:
      return "brier";
    case RiskKind::kOneMinusAuc:
      return "one_minus_auc";
  }
  return "unknown";
}

std::optional<RiskKind> ParseRiskKind(std::string_view name) {
  if (name == "log_loss") return RiskKind::kLogLoss;
  if (name == "brier") return RiskKind::kBrier;
  if (name == "one_minus_auc") return RiskKind::kOneMinusAuc;
  return std::nullopt;
}

bool IsDifferentiable(RiskKind kind) { return kind != RiskKind::kOneMinusAuc; }

double RocAuc(const Vector& scores, const Vector& labels) {
  CheckLengths(scores, labels);
  const Eigen::Index n = scores.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

  // Midranks over tied scores, then Mann-Whitney U.
  double positive_rank_sum = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1.0) {
        positive_rank_sum += midrank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw ContractError("degenerate labels");
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double EmpiricalRisk(const Vector& predictions, const Vector& labels, RiskKind kind) {
  CheckLengths(predictions, labels);
  const auto n = static_cast<double>(labels.size());
  switch (kind) {
    case RiskKind::kLogLoss: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < labels.size(); ++i) {
        const double p = predictions[i];
        sum -= labels[i] == 1.0 ? std::log(std::max(p, kLogLossEpsilon))
                                : std::log(std::max(1.0 - p, kLogLossEpsilon));
      }
      return sum / n;
    }
    case RiskKind::kBrier:
      return (predictions - labels).squaredNorm() / n;
    case RiskKind::kOneMinusAuc:
      return 1.0 - RocAuc(predictions, labels);
  }
  return 0.0;
}

Vector RiskDerivative(const Vector& predictions, const Vector& labels, RiskKind kind) {
  CheckLengths(predictions, labels);
  const auto n = static_cast<double>(labels.size());
  Vector d(labels.size());
  switch (kind) {
    case RiskKind::kLogLoss:
      for (Eigen::Index i = 0; i < labels.size(); ++i) {
        const double p = predictions[i];
        if (labels[i] == 1.0) {
          d[i] = p > kLogLossEpsilon ? -1.0 / (p * n) : 0.0;
        } else {
          d[i] = 1.0 - p > kLogLossEpsilon ? 1.0 / ((1.0 - p) * n) : 0.0;
        }
      }
      return d;
    case RiskKind::kBrier:
      return 2.0 * (predictions - labels) / n;
    case RiskKind::kOneMinusAuc:
      break;
  }
  throw ContractError("non-differentiable risk");
}

Vector ChainTrainRowGradient(const DifferentiablePredictor& predictor, const Dataset& train,
                             const Matrix& inference, const Vector& upstream, Eigen::Index row) {
  if (upstream.size() != inference.rows())
    throw ContractError("train row gradient: upstream length mismatch");
  const Matrix jac = predictor.TrainRowJacobian(train, inference, row);
  return jac.transpose() * upstream;
}

Vector RiskGradientWrtTrainRow(const DifferentiablePredictor& predictor, const Dataset& train,
                               const Dataset& inference, RiskKind kind, Eigen::Index row) {
  if (!IsDifferentiable(kind)) throw ContractError("non-differentiable risk");
  const Vector pred = predictor.Predict(train, inference.features()).probabilities;
  const Vector upstream = RiskDerivative(pred, inference.labels(), kind);
  return ChainTrainRowGradient(predictor, train, inference.features(), upstream, row);
}

Vector ReferenceGradientWrtTrain(const Dataset& train, const Dataset& inference, RiskKind kind,
                                 Eigen::Index row, double bandwidth) {
  const ReferencePredictor predictor(bandwidth);
  return RiskGradientWrtTrainRow(predictor, train, inference, kind, row);
}

}  // namespace ctximl
