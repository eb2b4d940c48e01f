#ifndef CTXIML_REFERENCE_PREDICTOR_H_
#define CTXIML_REFERENCE_PREDICTOR_H_

#include "ctximl/predictor.h"

namespace ctximl {

// Softmax-kernel posterior: for a query x*, returns sum_i w_i(x*) y_i with
// w_i = softmax_i(-||x* - x_i||^2 / bandwidth^2). Parameter-free given the
// context, permutation-invariant over training rows and differentiable in
// both the query and the context.
//
// Training rows are visited in a canonical (lexicographic) order, so any
// permutation of the context yields bit-identical output.
class ReferencePredictor final : public DifferentiablePredictor {
 public:
  explicit ReferencePredictor(double bandwidth = 1.0);

  double bandwidth() const { return bandwidth_; }

  Matrix InputGradient(const Dataset& train, const Matrix& inference) const override;
  Matrix TrainRowJacobian(const Dataset& train, const Matrix& inference,
                          Eigen::Index row) const override;

 protected:
  Vector DoPredict(const Dataset& train, const Matrix& inference) const override;

 private:
  double bandwidth_;
};

// Stateless form of the kernel predictor; no ledger involved. `labels` may
// hold relaxed real values.
Vector ReferencePredict(const Matrix& train_features, const Vector& labels,
                        const Matrix& inference, double bandwidth);

}  // namespace ctximl

#endif  // CTXIML_REFERENCE_PREDICTOR_H_
