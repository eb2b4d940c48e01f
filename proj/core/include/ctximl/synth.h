#ifndef CTXIML_SYNTH_H_
#define CTXIML_SYNTH_H_

#include <cstdint>
#include <optional>
#include <string_view>

#include "ctximl/dataset.h"

namespace ctximl {

enum class SynthTask { kGaussianClusters, kXor, kNoisyLinear };
std::string_view SynthTaskName(SynthTask task);
std::optional<SynthTask> ParseSynthTask(std::string_view name);

// gaussian_clusters: balanced classes, unit-variance clusters centred at
//   -+separation / 2 on every coordinate.
// xor: features uniform on [-1, 1]; label = (x0 > 0) xor (x1 > 0).
// noisy_linear: standard normal features, label = [x . w > 0] with w drawn
//   from the seed.
// Every task then flips each label independently with probability
// noise_rate.
struct SynthSpec {
  Eigen::Index n = 1000;
  Eigen::Index p = 10;
  SynthTask task = SynthTask::kGaussianClusters;
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
  double separation = 3.0;
};

struct SynthSample {
  Dataset data;
  Vector clean_labels;  // before flipping
};

// Throws ContractError when n < 4, p < 1, p < 2 for xor or noise_rate
// outside [0, 1].
SynthSample SynthGenerateDetailed(const SynthSpec& spec);
inline Dataset SynthGenerate(const SynthSpec& spec) { return SynthGenerateDetailed(spec).data; }

}  // namespace ctximl

#endif  // CTXIML_SYNTH_H_
