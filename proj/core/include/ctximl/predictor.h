#ifndef CTXIML_PREDICTOR_H_
#define CTXIML_PREDICTOR_H_

#include <cstdint>

#include "ctximl/cost.h"
#include "ctximl/dataset.h"

namespace ctximl {

// Positive-class probabilities, one per submitted inference row.
struct PredictionBatch {
  Vector probabilities;

  Eigen::Index size() const { return probabilities.size(); }
  double operator[](Eigen::Index i) const { return probabilities[i]; }
};

// An in-context learner: every call receives the full context (training
// set) together with the inference rows and "trains" and predicts in one
// forward pass. Implementations must be pure functions of their inputs so
// callers can evaluate independent calls concurrently.
//
// Every non-empty call is charged TokenCost(n_train, n_inf) on the ledger.
class Predictor {
 public:
  virtual ~Predictor() = default;

  // Throws ContractError on column-count mismatch or an empty context.
  // An empty inference set returns an empty batch without a forward pass.
  PredictionBatch Predict(const Dataset& train, const Matrix& inference) const;

  const CostLedger& ledger() const { return ledger_; }
  void ResetLedger() const { ledger_.Reset(); }

 protected:
  virtual Vector DoPredict(const Dataset& train, const Matrix& inference) const = 0;

 private:
  mutable CostLedger ledger_;
};

// A predictor exposing analytic derivatives of its output.
class DifferentiablePredictor : public Predictor {
 public:
  // n_inf x p matrix of d p_hat(x*_k) / d x*_k.
  virtual Matrix InputGradient(const Dataset& train, const Matrix& inference) const = 0;

  // n_inf x (p + 1) matrix of d p_hat(x*_k) / d (x_row, y_row), the label
  // coordinate relaxed to a real number.
  virtual Matrix TrainRowJacobian(const Dataset& train, const Matrix& inference,
                                  Eigen::Index row) const = 0;
};

// Default row budget of a single forward pass for batched routines.
inline constexpr Eigen::Index kDefaultMaxBatchRows = Eigen::Index{1} << 16;

// Predicts `inference` in the fewest calls of at most `max_batch_rows` rows
// each; every chunk is charged separately on the ledger.
Vector PredictChunked(const Predictor& predictor, const Dataset& train, const Matrix& inference,
                      Eigen::Index max_batch_rows = kDefaultMaxBatchRows);

}  // namespace ctximl

#endif  // CTXIML_PREDICTOR_H_
