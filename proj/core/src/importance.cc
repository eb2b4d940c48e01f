#include "ctximl/importance.h"

#include <string>

#include "ctximl/errors.h"
#include "ctximl/surrogate.h"

namespace ctximl {
namespace {

void CheckInputs(const Dataset& train, const Dataset& inference) {
  if (train.cols() != inference.cols())
    throw ContractError("importance: train and inference column counts differ");
  if (inference.empty()) throw ContractError("importance: empty inference set");
}

}  // namespace

std::string_view ImportanceMethodName(ImportanceMethod method) {
  return method == ImportanceMethod::kLoco ? "loco" : "sage";
}

double EmptyCoalitionRisk(const Dataset& train, const Dataset& inference, RiskKind kind) {
  return EmpiricalRisk(Vector::Constant(inference.rows(), train.PositiveRate()),
                       inference.labels(), kind);
}

ImportanceReport Loco(const Predictor& predictor, const Dataset& train, const Dataset& inference,
                      RiskKind kind) {
  CheckInputs(train, inference);
  const Eigen::Index p = train.cols();
  if (p < 2) throw ContractError("loco: need at least two features");
  const LedgerSnapshot before = predictor.ledger().Snapshot();

  ImportanceReport report;
  report.method = ImportanceMethod::kLoco;
  report.risk_kind = kind;
  report.baseline_risk = EmpiricalRisk(predictor.Predict(train, inference.features()),
                                       inference.labels(), kind);
  report.scores.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    FeatureSubset keep = FeatureSubset::Full(static_cast<std::size_t>(p));
    keep.Set(static_cast<std::size_t>(j), false);
    const Vector pred = ValueExactRetrain(predictor, train, inference.features(), keep);
    report.scores[j] = EmpiricalRisk(pred, inference.labels(), kind) - report.baseline_risk;
  }
  report.cost = predictor.ledger().Snapshot() - before;
  return report;
}

ImportanceReport Sage(const Predictor& predictor, const Dataset& train, const Dataset& inference,
                      int num_coalitions, RiskKind kind, std::uint64_t seed) {
  CheckInputs(train, inference);
  ImportanceReport report =
      Sage(predictor, train, inference,
           PlanCoalitions(static_cast<int>(train.cols()), num_coalitions, seed), kind);
  report.seed = seed;
  return report;
}

ImportanceReport Sage(const Predictor& predictor, const Dataset& train, const Dataset& inference,
                      const CoalitionPlan& plan, RiskKind kind) {
  CheckInputs(train, inference);
  const Eigen::Index p = train.cols();
  const LedgerSnapshot before = predictor.ledger().Snapshot();

  const auto m = static_cast<Eigen::Index>(plan.coalitions.size());
  Matrix design = Matrix::Zero(m, p);
  Matrix values(m, 1);
  for (Eigen::Index c = 0; c < m; ++c) {
    const FeatureSubset& s = plan.coalitions[static_cast<std::size_t>(c)];
    for (Eigen::Index j = 0; j < p; ++j) design(c, j) = s[static_cast<std::size_t>(j)] ? 1 : 0;
    values(c, 0) = EmpiricalRisk(ValueExactRetrain(predictor, train, inference.features(), s),
                                 inference.labels(), kind);
  }

  ImportanceReport report;
  report.method = ImportanceMethod::kSage;
  report.risk_kind = kind;
  report.num_coalitions = static_cast<int>(m);
  report.baseline_risk = EmpiricalRisk(predictor.Predict(train, inference.features()),
                                       inference.labels(), kind);
  report.empty_risk = EmptyCoalitionRisk(train, inference, kind);

  const SurrogateFit fit =
      SolveWeightedSurrogate(design, plan.weights, values, Vector::Constant(1, report.empty_risk),
                             Vector::Constant(1, report.baseline_risk),
                             WlsOptions{.allow_ridge_fallback = true});
  report.scores = -fit.phi.col(0);
  report.condition_number = fit.condition_number;
  report.cost = predictor.ledger().Snapshot() - before;
  return report;
}

}  // namespace ctximl
