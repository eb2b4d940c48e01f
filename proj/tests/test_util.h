#ifndef CTXIML_TESTS_TEST_UTIL_H_
#define CTXIML_TESTS_TEST_UTIL_H_

#include <cmath>
#include <functional>
#include <initializer_list>
#include <vector>

#include "ctximl/dataset.h"
#include "ctximl/predictor.h"
#include "ctximl/rng.h"

namespace ctximl::testing {

inline Matrix Rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector Vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Random dataset with standard normal features and both classes present.
inline Dataset RandomDataset(Rng& rng, Eigen::Index n, Eigen::Index p) {
  Matrix x(n, p);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.Normal();
    y[i] = x(i, 0) + 0.5 * rng.Normal() > 0.0 ? 1.0 : 0.0;
  }
  if (y.sum() == 0.0) y[0] = 1.0;
  if (y.sum() == static_cast<double>(n)) y[0] = 0.0;
  return Dataset(std::move(x), std::move(y));
}

inline Matrix RandomMatrix(Rng& rng, Eigen::Index n, Eigen::Index p) {
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.Normal();
  return x;
}

// Predictor evaluating a fixed function of each inference row, ignoring the
// context.
class FunctionPredictor : public Predictor {
 public:
  explicit FunctionPredictor(std::function<double(const Eigen::RowVectorXd&)> f)
      : f_(std::move(f)) {}

 protected:
  Vector DoPredict(const Dataset&, const Matrix& inference) const override {
    Vector out(inference.rows());
    for (Eigen::Index k = 0; k < inference.rows(); ++k) out[k] = f_(inference.row(k));
    return out;
  }

 private:
  std::function<double(const Eigen::RowVectorXd&)> f_;
};

inline bool RelClose(double a, double b, double rel, double floor = 1e-9) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace ctximl::testing

#endif  // CTXIML_TESTS_TEST_UTIL_H_
