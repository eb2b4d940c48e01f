#include "ctximl/reference_predictor.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ctximl/errors.h"

namespace ctximl {
namespace {

double InverseSquaredBandwidth(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw ContractError("reference predictor: bandwidth must be positive and finite");
  const double inv = 1.0 / (bandwidth * bandwidth);
  if (!std::isfinite(inv)) throw ContractError("reference predictor: bandwidth too small");
  return inv;
}

// Context rows in lexicographic order of (features, label). Rows that tie
// are identical, so any permutation of the input gives the same layout.
struct CanonicalContext {
  Matrix x;
  Vector y;
};

CanonicalContext Canonicalize(const Matrix& x, const Vector& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double* ra = x.row(a).data();
    const double* rb = x.row(b).data();
    for (Eigen::Index j = 0; j < p; ++j) {
      if (ra[j] < rb[j]) return true;
      if (rb[j] < ra[j]) return false;
    }
    return y[a] < y[b];
  });
  CanonicalContext ctx{Matrix(n, p), Vector(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    ctx.x.row(k) = x.row(order[static_cast<std::size_t>(k)]);
    ctx.y[k] = y[order[static_cast<std::size_t>(k)]];
  }
  return ctx;
}

// Fills `logits` with -||q - x_i||^2 / h^2 and returns their maximum.
double Logits(const Matrix& x, const double* query, double inv_h2, double* logits) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double* data = x.data();
  double max_logit = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* row = data + i * p;
    double d = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double diff = query[j] - row[j];
      d += diff * diff;
    }
    logits[i] = -d * inv_h2;
    max_logit = std::max(max_logit, logits[i]);
  }
  return max_logit;
}

// Normalized kernel weights in the caller's row order. Returns p_hat.
double Weights(const Matrix& x, const Vector& y, const double* query, double inv_h2,
               std::vector<double>& w) {
  w.resize(static_cast<std::size_t>(x.rows()));
  const double max_logit = Logits(x, query, inv_h2, w.data());
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - max_logit);
    total += v;
  }
  double p_hat = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] /= total;
    p_hat += w[i] * y[static_cast<Eigen::Index>(i)];
  }
  return p_hat;
}

void CheckShapes(const Matrix& train, const Vector& labels, const Matrix& inference) {
  if (train.rows() != labels.size())
    throw ContractError("reference predictor: feature rows and labels differ in length");
  if (inference.cols() != train.cols())
    throw ContractError("reference predictor: column-count mismatch");
  if (train.rows() == 0) throw ContractError("empty context");
}

}  // namespace

Vector ReferencePredict(const Matrix& train_features, const Vector& labels,
                        const Matrix& inference, double bandwidth) {
  const double inv_h2 = InverseSquaredBandwidth(bandwidth);
  if (inference.rows() == 0) return Vector(0);
  CheckShapes(train_features, labels, inference);

  const CanonicalContext ctx = Canonicalize(train_features, labels);
  // Column-major copy so the distance loop runs over contiguous training rows.
  const Eigen::MatrixXd xt = ctx.x;
  const Eigen::Index p = xt.cols();
  Eigen::ArrayXd d2(xt.rows());
  Vector out(inference.rows());
  for (Eigen::Index k = 0; k < inference.rows(); ++k) {
    d2.setZero();
    for (Eigen::Index j = 0; j < p; ++j) d2 += (xt.col(j).array() - inference(k, j)).square();
    const double min_d2 = d2.minCoeff();
    d2 = (-(d2 - min_d2) * inv_h2).exp();
    const double total = d2.sum();
    const double positive = (d2 * ctx.y.array()).sum();
    out[k] = std::clamp(positive / total, 0.0, 1.0);
  }
  return out;
}

ReferencePredictor::ReferencePredictor(double bandwidth) : bandwidth_(bandwidth) {
  InverseSquaredBandwidth(bandwidth_);
}

Vector ReferencePredictor::DoPredict(const Dataset& train, const Matrix& inference) const {
  return ReferencePredict(train.features(), train.labels(), inference, bandwidth_);
}

Matrix ReferencePredictor::InputGradient(const Dataset& train, const Matrix& inference) const {
  CheckShapes(train.features(), train.labels(), inference);
  const double inv_h2 = InverseSquaredBandwidth(bandwidth_);
  const Matrix& x = train.features();
  const Vector& y = train.labels();
  const Eigen::Index p = x.cols();

  // d p_hat / d x* = (2 / h^2) sum_i w_i (y_i - p_hat) (x_i - x*)
  Matrix grad = Matrix::Zero(inference.rows(), p);
  std::vector<double> w;
  for (Eigen::Index k = 0; k < inference.rows(); ++k) {
    const double* q = inference.row(k).data();
    const double p_hat = Weights(x, y, q, inv_h2, w);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double coef = 2.0 * inv_h2 * w[static_cast<std::size_t>(i)] * (y[i] - p_hat);
      for (Eigen::Index j = 0; j < p; ++j) grad(k, j) += coef * (x(i, j) - q[j]);
    }
  }
  return grad;
}

Matrix ReferencePredictor::TrainRowJacobian(const Dataset& train, const Matrix& inference,
                                            Eigen::Index row) const {
  CheckShapes(train.features(), train.labels(), inference);
  if (row < 0 || row >= train.rows())
    throw ContractError("train row jacobian: row index out of range");
  const double inv_h2 = InverseSquaredBandwidth(bandwidth_);
  const Matrix& x = train.features();
  const Vector& y = train.labels();
  const Eigen::Index p = x.cols();

  // d p_hat / d x_j = w_j (y_j - p_hat) (2 / h^2) (x* - x_j);  d p_hat / d y_j = w_j
  Matrix jac(inference.rows(), p + 1);
  std::vector<double> w;
  for (Eigen::Index k = 0; k < inference.rows(); ++k) {
    const double* q = inference.row(k).data();
    const double p_hat = Weights(x, y, q, inv_h2, w);
    const double wj = w[static_cast<std::size_t>(row)];
    const double coef = 2.0 * inv_h2 * wj * (y[row] - p_hat);
    for (Eigen::Index j = 0; j < p; ++j) jac(k, j) = coef * (q[j] - x(row, j));
    jac(k, p) = wj;
  }
  return jac;
}

}  // namespace ctximl
