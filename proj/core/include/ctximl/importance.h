#ifndef CTXIML_IMPORTANCE_H_
#define CTXIML_IMPORTANCE_H_

#include <cstdint>
#include <optional>
#include <string_view>

#include "ctximl/cost.h"
#include "ctximl/dataset.h"
#include "ctximl/predictor.h"
#include "ctximl/risk.h"
#include "ctximl/shapley.h"

namespace ctximl {

enum class ImportanceMethod { kLoco, kSage };
std::string_view ImportanceMethodName(ImportanceMethod method);

struct ImportanceReport {
  Vector scores;  // one per feature
  ImportanceMethod method = ImportanceMethod::kLoco;
  RiskKind risk_kind = RiskKind::kLogLoss;
  double baseline_risk = 0.0;  // risk with all features
  // SAGE only: risk of the empty coalition (base-rate predictions).
  double empty_risk = 0.0;
  int num_coalitions = 0;
  std::uint64_t seed = 0;
  double condition_number = 1.0;
  LedgerSnapshot cost;
};

// score_j = R(f_PFN(x*_{-j}, D_{-j})) - R(f_PFN(x*, D)) on the labelled
// inference set. p + 1 forward passes.
ImportanceReport Loco(const Predictor& predictor, const Dataset& train, const Dataset& inference,
                      RiskKind kind);

// Kernel SHAP on the risk game v(S) = R(f_PFN(x*_S, D_S)), with
// v(empty) = risk of predicting the training base rate everywhere. Scores
// are attributions of risk reduction (the negated game attributions), so
// sum_j score_j = v(empty) - v(full).
ImportanceReport Sage(const Predictor& predictor, const Dataset& train, const Dataset& inference,
                      int num_coalitions, RiskKind kind, std::uint64_t seed);
ImportanceReport Sage(const Predictor& predictor, const Dataset& train, const Dataset& inference,
                      const CoalitionPlan& plan, RiskKind kind);

// Risk of base-rate predictions on `inference`.
double EmptyCoalitionRisk(const Dataset& train, const Dataset& inference, RiskKind kind);

}  // namespace ctximl

#endif  // CTXIML_IMPORTANCE_H_
