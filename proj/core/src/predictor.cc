#include "ctximl/predictor.h"

#include <algorithm>
#include <string>

#include "ctximl/errors.h"

namespace ctximl {

PredictionBatch Predictor::Predict(const Dataset& train, const Matrix& inference) const {
  if (inference.cols() != train.cols()) {
    throw ContractError("predict: inference has " + std::to_string(inference.cols()) +
                        " columns, context has " + std::to_string(train.cols()));
  }
  if (inference.rows() == 0) return {Vector(0)};
  if (train.empty()) throw ContractError("empty context");
  Vector proba = DoPredict(train, inference);
  ledger_.Record(static_cast<std::uint64_t>(train.rows()),
                 static_cast<std::uint64_t>(inference.rows()));
  return {std::move(proba)};
}

Vector PredictChunked(const Predictor& predictor, const Dataset& train, const Matrix& inference,
                      Eigen::Index max_batch_rows) {
  if (max_batch_rows <= 0) throw ContractError("max_batch_rows must be positive");
  const Eigen::Index n = inference.rows();
  if (n <= max_batch_rows) return predictor.Predict(train, inference).probabilities;
  Vector out(n);
  for (Eigen::Index start = 0; start < n; start += max_batch_rows) {
    const Eigen::Index len = std::min(max_batch_rows, n - start);
    out.segment(start, len) =
        predictor.Predict(train, inference.middleRows(start, len)).probabilities;
  }
  return out;
}

}  // namespace ctximl
