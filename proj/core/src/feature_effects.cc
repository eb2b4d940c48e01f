#include "ctximl/feature_effects.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctximl/errors.h"

namespace ctximl {
namespace {

void CheckGrid(const GridSpec& grid, const Dataset& train, const Matrix& inference) {
  if (grid.feature_index < 0 || grid.feature_index >= train.cols())
    throw ContractError("feature effects: feature index " + std::to_string(grid.feature_index) +
                        " out of range");
  if (inference.cols() != train.cols())
    throw ContractError("feature effects: column-count mismatch");
  if (grid.points.size() < 2) throw ContractError("feature effects: grid needs two points");
}

// Row g * n_inf + i is inference row i with the target column set to z_g.
Matrix GridArray(const Matrix& inference, const GridSpec& grid) {
  const Eigen::Index n = inference.rows();
  const auto g_count = static_cast<Eigen::Index>(grid.points.size());
  Matrix rows(g_count * n, inference.cols());
  for (Eigen::Index g = 0; g < g_count; ++g) {
    rows.middleRows(g * n, n) = inference;
    rows.col(grid.feature_index).segment(g * n, n).setConstant(grid.points[std::size_t(g)]);
  }
  return rows;
}

double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view GridStrategyName(GridStrategy strategy) {
  switch (strategy) {
    case GridStrategy::kUniqueValues:
      return "unique_values";
    case GridStrategy::kQuantile:
      return "quantile";
    case GridStrategy::kUniform:
      return "uniform";
  }
  return "unknown";
}

std::optional<GridStrategy> ParseGridStrategy(std::string_view name) {
  if (name == "unique_values") return GridStrategy::kUniqueValues;
  if (name == "quantile") return GridStrategy::kQuantile;
  if (name == "uniform") return GridStrategy::kUniform;
  return std::nullopt;
}

std::string_view EffectKindName(EffectKind kind) {
  switch (kind) {
    case EffectKind::kIce:
      return "ice";
    case EffectKind::kPd:
      return "pd";
    case EffectKind::kAle:
      return "ale";
  }
  return "unknown";
}

GridSpec BuildGrid(const Vector& column, int num_points, GridStrategy strategy,
                   Eigen::Index feature_index) {
  if (column.size() == 0) throw ContractError("build_grid: empty column");
  if (num_points < 2) throw ContractError("build_grid: need at least two grid points");
  std::vector<double> sorted(column.data(), column.data() + column.size());
  std::sort(sorted.begin(), sorted.end());

  GridSpec grid;
  grid.feature_index = feature_index;
  grid.strategy = strategy;
  switch (strategy) {
    case GridStrategy::kUniqueValues:
      grid.points = sorted;
      break;
    case GridStrategy::kQuantile:
      for (int k = 0; k < num_points; ++k)
        grid.points.push_back(Quantile(sorted, static_cast<double>(k) / (num_points - 1)));
      break;
    case GridStrategy::kUniform: {
      const double lo = sorted.front();
      const double hi = sorted.back();
      for (int k = 0; k < num_points; ++k) {
        grid.points.push_back(k == num_points - 1
                                  ? hi
                                  : lo + (hi - lo) * static_cast<double>(k) / (num_points - 1));
      }
      break;
    }
  }
  grid.points.erase(std::unique(grid.points.begin(), grid.points.end()), grid.points.end());
  if (grid.points.size() < 2) throw ContractError("degenerate grid");
  return grid;
}

EffectCurve Ice(const Predictor& predictor, const Dataset& train, const Matrix& inference,
                const GridSpec& grid, const EffectOptions& options) {
  CheckGrid(grid, train, inference);
  const Eigen::Index n = inference.rows();
  const auto g_count = static_cast<Eigen::Index>(grid.points.size());
  EffectCurve curve;
  curve.grid = grid;
  curve.kind = EffectKind::kIce;
  curve.values = Matrix::Zero(g_count, n);
  if (n == 0) return curve;
  const Vector flat = PredictChunked(predictor, train, GridArray(inference, grid),
                                     options.max_batch_rows);
  for (Eigen::Index g = 0; g < g_count; ++g) curve.values.row(g) = flat.segment(g * n, n);
  return curve;
}

EffectCurve PartialDependence(const Predictor& predictor, const Dataset& train,
                              const Matrix& inference, const GridSpec& grid,
                              const EffectOptions& options) {
  if (inference.rows() == 0) throw ContractError("partial dependence: no inference rows");
  EffectCurve ice = Ice(predictor, train, inference, grid, options);
  EffectCurve pd;
  pd.grid = grid;
  pd.kind = EffectKind::kPd;
  pd.values = ice.values.rowwise().mean();
  return pd;
}

EffectCurve IceNaive(const Predictor& predictor, const Dataset& train, const Matrix& inference,
                     const GridSpec& grid) {
  CheckGrid(grid, train, inference);
  const auto g_count = static_cast<Eigen::Index>(grid.points.size());
  EffectCurve curve;
  curve.grid = grid;
  curve.kind = EffectKind::kIce;
  curve.values = Matrix::Zero(g_count, inference.rows());
  Matrix rows = inference;
  for (Eigen::Index g = 0; g < g_count; ++g) {
    rows.col(grid.feature_index).setConstant(grid.points[std::size_t(g)]);
    curve.values.row(g) = predictor.Predict(train, rows).probabilities.transpose();
  }
  return curve;
}

EffectCurve PartialDependenceNaive(const Predictor& predictor, const Dataset& train,
                                   const Matrix& inference, const GridSpec& grid) {
  if (inference.rows() == 0) throw ContractError("partial dependence: no inference rows");
  EffectCurve ice = IceNaive(predictor, train, inference, grid);
  EffectCurve pd;
  pd.grid = grid;
  pd.kind = EffectKind::kPd;
  pd.values = ice.values.rowwise().mean();
  return pd;
}

EffectCurve Ale(const Predictor& predictor, const Dataset& train, const Matrix& inference,
                const GridSpec& grid, const EffectOptions& options) {
  CheckGrid(grid, train, inference);
  const auto& z = grid.points;
  const std::size_t bins = z.size() - 1;
  const Eigen::Index col = grid.feature_index;

  EffectCurve curve;
  curve.grid = grid;
  curve.kind = EffectKind::kAle;
  curve.ale.bin_counts.assign(bins, 0);

  // Bin membership: (z_{k-1}, z_k], z_0 belongs to the first bin.
  std::vector<std::vector<Eigen::Index>> members(bins);
  for (Eigen::Index i = 0; i < inference.rows(); ++i) {
    const double v = inference(i, col);
    if (v < z.front() || v > z.back()) {
      ++curve.ale.rows_outside_grid;
      continue;
    }
    std::size_t k = static_cast<std::size_t>(std::lower_bound(z.begin(), z.end(), v) - z.begin());
    k = k == 0 ? 0 : k - 1;
    members[k].push_back(i);
  }

  Eigen::Index total = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    curve.ale.bin_counts[k] = static_cast<Eigen::Index>(members[k].size());
    if (members[k].empty()) curve.ale.empty_bins.push_back(static_cast<Eigen::Index>(k));
    total += curve.ale.bin_counts[k];
  }

  Vector local = Vector::Zero(static_cast<Eigen::Index>(bins));
  if (total > 0) {
    // Rows 2r and 2r + 1 are the lower and upper edge of member r.
    Matrix rows(2 * total, inference.cols());
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < bins; ++k) {
      for (Eigen::Index i : members[k]) {
        rows.row(2 * r) = inference.row(i);
        rows(2 * r, col) = z[k];
        rows.row(2 * r + 1) = inference.row(i);
        rows(2 * r + 1, col) = z[k + 1];
        ++r;
      }
    }
    const Vector f = PredictChunked(predictor, train, rows, options.max_batch_rows);
    r = 0;
    for (std::size_t k = 0; k < bins; ++k) {
      if (members[k].empty()) continue;
      double sum = 0.0;
      for (std::size_t m = 0; m < members[k].size(); ++m, ++r) sum += f[2 * r + 1] - f[2 * r];
      local[static_cast<Eigen::Index>(k)] = sum / static_cast<double>(members[k].size());
    }
  }

  Vector accumulated = Vector::Zero(static_cast<Eigen::Index>(z.size()));
  for (std::size_t k = 0; k < bins; ++k)
    accumulated[static_cast<Eigen::Index>(k + 1)] =
        accumulated[static_cast<Eigen::Index>(k)] + local[static_cast<Eigen::Index>(k)];

  if (total > 0) {
    double mean = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      mean += static_cast<double>(curve.ale.bin_counts[k]) * 0.5 *
              (accumulated[kk] + accumulated[kk + 1]);
    }
    accumulated.array() -= mean / static_cast<double>(total);
  }
  curve.values = accumulated;
  return curve;
}

}  // namespace ctximl
