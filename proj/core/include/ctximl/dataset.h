#ifndef CTXIML_DATASET_H_
#define CTXIML_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ctximl {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Feature matrix plus binary labels. Immutable after construction; the
// constructor rejects non-finite features and labels outside {0, 1}.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix features, Vector labels, std::vector<std::string> column_names = {});

  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

  Eigen::Index rows() const { return features_.rows(); }
  Eigen::Index cols() const { return features_.cols(); }
  bool empty() const { return features_.rows() == 0; }

  // Fraction of rows labelled 1; 0 for an empty dataset.
  double PositiveRate() const;
  bool HasBothClasses() const;

 private:
  Matrix features_;
  Vector labels_;
  std::vector<std::string> column_names_;
};

// Bit mask over a set of players. The tag keeps feature masks and
// observation masks from being mixed up.
template <typename Tag>
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::size_t size, bool value = false) : bits_(size, value ? 1 : 0) {}
  explicit Subset(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
  }

  static Subset Full(std::size_t size) { return Subset(size, true); }
  static Subset FromMask(std::uint64_t mask, std::size_t size) {
    Subset s(size);
    for (std::size_t j = 0; j < size && j < 64; ++j) s.bits_[j] = (mask >> j) & 1U;
    return s;
  }
  static Subset FromIndices(const std::vector<std::size_t>& indices, std::size_t size) {
    Subset s(size);
    for (std::size_t i : indices) s.bits_.at(i) = 1;
    return s;
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void Set(std::size_t i, bool value = true) { bits_.at(i) = value ? 1 : 0; }

  std::size_t Count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }
  bool None() const { return Count() == 0; }
  bool All() const { return Count() == bits_.size(); }

  Subset Complement() const {
    Subset c(*this);
    for (auto& b : c.bits_) b ^= 1U;
    return c;
  }

  std::vector<std::size_t> Indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  bool operator==(const Subset&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct FeatureTag {};
struct ObservationTag {};
using FeatureSubset = Subset<FeatureTag>;
using ObservationSubset = Subset<ObservationTag>;

// Keeps the masked-in columns of `data`; labels and row order are untouched.
// An empty mask yields a zero-column dataset.
Dataset RestrictFeatures(const Dataset& data, const FeatureSubset& subset);
Matrix RestrictColumns(const Matrix& features, const FeatureSubset& subset);

// Keeps the masked-in rows of `data`.
Dataset RestrictObservations(const Dataset& data, const ObservationSubset& subset);

// Rows picked by index, in the given order.
Dataset SelectRows(const Dataset& data, const std::vector<std::size_t>& rows);

// Z-score standardization with statistics fitted on one dataset (normally
// the training split) and applied to any other. Constant columns get unit
// divisor.
class Standardizer {
 public:
  static Standardizer Fit(const Matrix& features);

  Matrix Apply(const Matrix& features) const;
  Dataset Apply(const Dataset& data) const;

  const Vector& mean() const { return mean_; }
  const Vector& scale() const { return scale_; }

 private:
  Vector mean_;
  Vector scale_;
};

}  // namespace ctximl

#endif  // CTXIML_DATASET_H_
