#include "ctximl/dataset.h"

#include <cmath>
#include <string>

#include "ctximl/errors.h"

namespace ctximl {

Dataset::Dataset(Matrix features, Vector labels, std::vector<std::string> column_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      column_names_(std::move(column_names)) {
  if (features_.rows() != labels_.size()) {
    throw ContractError("dataset: " + std::to_string(features_.rows()) + " feature rows but " +
                        std::to_string(labels_.size()) + " labels");
  }
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0.0 && labels_[i] != 1.0) {
      throw ContractError("dataset: label at row " + std::to_string(i) + " is not in {0,1}");
    }
  }
  if (!features_.allFinite()) {
    for (Eigen::Index i = 0; i < features_.rows(); ++i) {
      if (!features_.row(i).allFinite()) {
        throw ContractError("dataset: non-finite feature value in row " + std::to_string(i));
      }
    }
  }
  if (column_names_.empty()) {
    for (Eigen::Index j = 0; j < features_.cols(); ++j)
      column_names_.push_back("x" + std::to_string(j));
  } else if (static_cast<Eigen::Index>(column_names_.size()) != features_.cols()) {
    throw ContractError("dataset: column name count does not match column count");
  }
}

double Dataset::PositiveRate() const {
  if (labels_.size() == 0) return 0.0;
  return labels_.sum() / static_cast<double>(labels_.size());
}

bool Dataset::HasBothClasses() const {
  bool zero = false;
  bool one = false;
  for (Eigen::Index i = 0; i < labels_.size(); ++i) (labels_[i] == 1.0 ? one : zero) = true;
  return zero && one;
}

Matrix RestrictColumns(const Matrix& features, const FeatureSubset& subset) {
  if (static_cast<Eigen::Index>(subset.size()) != features.cols()) {
    throw ContractError("restrict_features: mask length " + std::to_string(subset.size()) +
                        " does not match " + std::to_string(features.cols()) + " columns");
  }
  const auto keep = subset.Indices();
  Matrix out(features.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) = features.col(static_cast<Eigen::Index>(keep[k]));
  return out;
}

Dataset RestrictFeatures(const Dataset& data, const FeatureSubset& subset) {
  Matrix features = RestrictColumns(data.features(), subset);
  std::vector<std::string> names;
  for (std::size_t j : subset.Indices()) names.push_back(data.column_names()[j]);
  return Dataset(std::move(features), data.labels(), std::move(names));
}

Dataset SelectRows(const Dataset& data, const std::vector<std::size_t>& rows) {
  Matrix features(static_cast<Eigen::Index>(rows.size()), data.cols());
  Vector labels(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(rows[k]);
    if (r >= data.rows()) throw ContractError("select_rows: row index out of range");
    features.row(static_cast<Eigen::Index>(k)) = data.features().row(r);
    labels[static_cast<Eigen::Index>(k)] = data.labels()[r];
  }
  return Dataset(std::move(features), std::move(labels), data.column_names());
}

Dataset RestrictObservations(const Dataset& data, const ObservationSubset& subset) {
  if (static_cast<Eigen::Index>(subset.size()) != data.rows()) {
    throw ContractError("restrict_observations: mask length " + std::to_string(subset.size()) +
                        " does not match " + std::to_string(data.rows()) + " rows");
  }
  return SelectRows(data, subset.Indices());
}

Standardizer Standardizer::Fit(const Matrix& features) {
  Standardizer s;
  const auto n = features.rows();
  s.mean_ = Vector::Zero(features.cols());
  s.scale_ = Vector::Ones(features.cols());
  if (n == 0) return s;
  s.mean_ = features.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double var =
        (features.col(j).array() - s.mean_[j]).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    s.scale_[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::Apply(const Matrix& features) const {
  if (features.cols() != mean_.size())
    throw ContractError("standardizer: column count mismatch");
  Matrix out = features;
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    out.col(j) = (out.col(j).array() - mean_[j]) / scale_[j];
  return out;
}

Dataset Standardizer::Apply(const Dataset& data) const {
  return Dataset(Apply(data.features()), data.labels(), data.column_names());
}

}  // namespace ctximl
