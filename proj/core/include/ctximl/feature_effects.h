#ifndef CTXIML_FEATURE_EFFECTS_H_
#define CTXIML_FEATURE_EFFECTS_H_

#include <optional>
#include <string_view>
#include <vector>

#include "ctximl/dataset.h"
#include "ctximl/predictor.h"

namespace ctximl {

enum class GridStrategy { kUniqueValues, kQuantile, kUniform };

std::string_view GridStrategyName(GridStrategy strategy);
std::optional<GridStrategy> ParseGridStrategy(std::string_view name);

struct GridSpec {
  Eigen::Index feature_index = 0;
  std::vector<double> points;  // strictly increasing, at least two
  GridStrategy strategy = GridStrategy::kUniqueValues;
};

// unique_values: sorted distinct values (num_points ignored).
// quantile: num_points linearly interpolated empirical quantiles at
//   k / (num_points - 1), duplicates collapsed.
// uniform: num_points equally spaced points on [min, max].
// Throws ContractError("degenerate grid") when fewer than two distinct
// points remain.
GridSpec BuildGrid(const Vector& column, int num_points, GridStrategy strategy,
                   Eigen::Index feature_index = 0);

enum class EffectKind { kIce, kPd, kAle };
std::string_view EffectKindName(EffectKind kind);

struct AleDiagnostics {
  std::vector<Eigen::Index> bin_counts;  // one per interval
  std::vector<Eigen::Index> empty_bins;
  Eigen::Index rows_outside_grid = 0;
};

struct EffectCurve {
  GridSpec grid;
  // ICE: G x n_inf. PD and ALE: G x 1.
  Matrix values;
  EffectKind kind = EffectKind::kIce;
  AleDiagnostics ale;
};

struct EffectOptions {
  Eigen::Index max_batch_rows = kDefaultMaxBatchRows;
};

// All G * n_inf perturbed rows go through one forward pass (more only when
// the batch exceeds max_batch_rows).
EffectCurve Ice(const Predictor& predictor, const Dataset& train, const Matrix& inference,
                const GridSpec& grid, const EffectOptions& options = {});
EffectCurve PartialDependence(const Predictor& predictor, const Dataset& train,
                              const Matrix& inference, const GridSpec& grid,
                              const EffectOptions& options = {});

// First-order accumulated local effects. Inference rows are binned on the
// grid intervals (z_{k-1}, z_k], the first interval also taking z_0; rows
// outside [z_0, z_G] are skipped. Each bin's local effect is the mean of
// f(z_k) - f(z_{k-1}) over its rows, an empty bin contributing zero. The
// accumulated curve is centered so its count-weighted mean over bins is 0.
// All bin-edge evaluations share one forward pass.
EffectCurve Ale(const Predictor& predictor, const Dataset& train, const Matrix& inference,
                const GridSpec& grid, const EffectOptions& options = {});

// Baselines that call the predictor once per grid point.
EffectCurve IceNaive(const Predictor& predictor, const Dataset& train, const Matrix& inference,
                     const GridSpec& grid);
EffectCurve PartialDependenceNaive(const Predictor& predictor, const Dataset& train,
                                   const Matrix& inference, const GridSpec& grid);

}  // namespace ctximl

#endif  // CTXIML_FEATURE_EFFECTS_H_
