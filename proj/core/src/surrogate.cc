#include "ctximl/surrogate.h"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace ctximl {
namespace {

std::string JoinIndices(const std::vector<Eigen::Index>& idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(idx[i]);
  }
  return s + "}";
}

}  // namespace

WlsFit WeightedLeastSquares(const Matrix& design, const Vector& weights, const Matrix& targets,
                            const WlsOptions& options) {
  const Eigen::Index m = design.rows();
  const Eigen::Index k = design.cols();
  if (weights.size() != m || targets.rows() != m)
    throw ContractError("weighted least squares: row counts disagree");
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw ContractError("weighted least squares: weights must be positive and finite");

  WlsFit fit;
  if (k == 0) {
    fit.coefficients = Matrix::Zero(0, targets.cols());
    return fit;
  }

  const Vector sqrt_w = weights.cwiseSqrt();
  const Eigen::MatrixXd aw = sqrt_w.asDiagonal() * design;
  const Eigen::MatrixXd bw = sqrt_w.asDiagonal() * targets;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(aw, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() ? sigma[0] : 0.0;
  const double threshold = options.rank_tolerance * sigma_max;
  fit.rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > threshold) ++fit.rank;

  const double sigma_min = sigma.size() == k ? sigma[k - 1] : 0.0;
  fit.condition_number = sigma_min > 0.0 ? (sigma_max / sigma_min) * (sigma_max / sigma_min)
                                         : std::numeric_limits<double>::infinity();

  if (fit.rank == k && m >= k) {
    svd.setThreshold(options.rank_tolerance);
    fit.coefficients = svd.solve(bw);
    return fit;
  }

  if (!options.allow_ridge_fallback) {
    // Columns loading on the numerical null space are the unidentifiable ones.
    Eigen::JacobiSVD<Eigen::MatrixXd> full(aw, Eigen::ComputeFullV);
    const Eigen::MatrixXd& v = full.matrixV();
    std::vector<Eigen::Index> columns;
    for (Eigen::Index j = 0; j < k; ++j) {
      double load = 0.0;
      for (Eigen::Index c = fit.rank; c < k; ++c) load = std::max(load, std::abs(v(j, c)));
      if (load > 1e-8) columns.push_back(j);
    }
    throw RankDeficiencyError("rank-deficient design: unidentifiable columns " +
                                  JoinIndices(columns),
                              std::move(columns));
  }

  const Eigen::MatrixXd normal =
      aw.transpose() * aw + options.ridge * Eigen::MatrixXd::Identity(k, k);
  fit.coefficients = normal.ldlt().solve(aw.transpose() * bw);
  fit.ridge_fallback = true;
  return fit;
}

SurrogateFit SolveWeightedSurrogate(const Matrix& design, const Vector& weights,
                                    const Matrix& values, const Vector& v_empty,
                                    const Vector& v_full, const WlsOptions& options) {
  const Eigen::Index m = design.rows();
  const Eigen::Index p = design.cols();
  const Eigen::Index targets = values.cols();
  if (p < 1) throw ContractError("surrogate: need at least one player");
  if (values.rows() != m || weights.size() != m)
    throw ContractError("surrogate: design, weights and values disagree in row count");
  if (v_empty.size() != targets || v_full.size() != targets)
    throw ContractError("surrogate: boundary values must have one entry per target");
  for (Eigen::Index r = 0; r < m; ++r) {
    double size = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double z = design(r, j);
      if (z != 0.0 && z != 1.0) throw ContractError("surrogate: design must be binary");
      size += z;
    }
    if (size == 0.0 || size == static_cast<double>(p))
      throw ContractError("surrogate: boundary coalitions are handled by the constraints");
  }

  SurrogateFit out;
  out.base_value = v_empty;
  out.phi = Matrix::Zero(p, targets);
  const Vector delta = v_full - v_empty;
  if (p == 1) {
    out.phi.row(0) = delta.transpose();
    return out;
  }

  // y - v_empty - z_p * delta = sum_{j < p} (z_j - z_p) phi_j
  Matrix reduced(m, p - 1);
  Matrix rhs(m, targets);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double zp = design(r, p - 1);
    for (Eigen::Index j = 0; j + 1 < p; ++j) reduced(r, j) = design(r, j) - zp;
    for (Eigen::Index t = 0; t < targets; ++t)
      rhs(r, t) = values(r, t) - v_empty[t] - zp * delta[t];
  }

  WlsFit fit;
  try {
    fit = WeightedLeastSquares(reduced, weights, rhs, options);
  } catch (const RankDeficiencyError& e) {
    std::vector<Eigen::Index> features = e.columns();
    features.push_back(p - 1);
    throw RankDeficiencyError("insufficient coalition diversity: unidentifiable features " +
                                  JoinIndices(features),
                              features);
  }
  out.phi.topRows(p - 1) = fit.coefficients;
  out.phi.row(p - 1) = delta.transpose() - fit.coefficients.colwise().sum();
  out.condition_number = fit.condition_number;
  out.ridge_fallback = fit.ridge_fallback;
  return out;
}

}  // namespace ctximl
