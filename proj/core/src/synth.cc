#include "ctximl/synth.h"

#include <cmath>
#include <string>

#include "ctximl/errors.h"
#include "ctximl/rng.h"

namespace ctximl {
namespace {

enum StreamPurpose : std::uint64_t { kFeatures = 21, kWeights = 22, kFlips = 23, kClass = 24 };

}  // namespace

std::string_view SynthTaskName(SynthTask task) {
  switch (task) {
    case SynthTask::kGaussianClusters:
      return "gaussian_clusters";
    case SynthTask::kXor:
      return "xor";
    case SynthTask::kNoisyLinear:
      return "noisy_linear";
  }
  return "unknown";
}

std::optional<SynthTask> ParseSynthTask(std::string_view name) {
  for (SynthTask t : {SynthTask::kGaussianClusters, SynthTask::kXor, SynthTask::kNoisyLinear})
    if (SynthTaskName(t) == name) return t;
  return std::nullopt;
}

SynthSample SynthGenerateDetailed(const SynthSpec& spec) {
  if (spec.n < 4) throw ContractError("synth: n must be at least 4");
  if (spec.p < 1) throw ContractError("synth: p must be at least 1");
  if (spec.task == SynthTask::kXor && spec.p < 2) throw ContractError("synth: xor needs p >= 2");
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate <= 1.0))
    throw ContractError("synth: noise_rate must lie in [0, 1]");

  Matrix x(spec.n, spec.p);
  Vector clean(spec.n);
  Rng features = Rng::Stream(spec.seed, 0, kFeatures);
  switch (spec.task) {
    case SynthTask::kGaussianClusters: {
      Rng cls = Rng::Stream(spec.seed, 0, kClass);
      for (Eigen::Index i = 0; i < spec.n; ++i) {
        clean[i] = cls.Bernoulli(0.5) ? 1.0 : 0.0;
        const double centre = (clean[i] - 0.5) * spec.separation;
        for (Eigen::Index j = 0; j < spec.p; ++j) x(i, j) = centre + features.Normal();
      }
      break;
    }
    case SynthTask::kXor:
      for (Eigen::Index i = 0; i < spec.n; ++i) {
        for (Eigen::Index j = 0; j < spec.p; ++j) x(i, j) = 2.0 * features.Uniform() - 1.0;
        clean[i] = (x(i, 0) > 0.0) != (x(i, 1) > 0.0) ? 1.0 : 0.0;
      }
      break;
    case SynthTask::kNoisyLinear: {
      Rng weights = Rng::Stream(spec.seed, 0, kWeights);
      Vector w(spec.p);
      for (Eigen::Index j = 0; j < spec.p; ++j) w[j] = weights.Normal();
      for (Eigen::Index i = 0; i < spec.n; ++i) {
        for (Eigen::Index j = 0; j < spec.p; ++j) x(i, j) = features.Normal();
        clean[i] = x.row(i).dot(w) > 0.0 ? 1.0 : 0.0;
      }
      break;
    }
  }

  Vector labels = clean;
  Rng flips = Rng::Stream(spec.seed, 0, kFlips);
  for (Eigen::Index i = 0; i < spec.n; ++i)
    if (flips.Bernoulli(spec.noise_rate)) labels[i] = 1.0 - labels[i];
  return {Dataset(std::move(x), std::move(labels)), std::move(clean)};
}

}  // namespace ctximl
