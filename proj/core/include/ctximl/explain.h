#ifndef CTXIML_EXPLAIN_H_
#define CTXIML_EXPLAIN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ctximl/config.h"
#include "ctximl/cost.h"
#include "ctximl/experiments.h"

namespace ctximl {

// Method names accepted in ExperimentConfig::methods.
const std::vector<std::string>& ExplainMethods();

struct ManifestEntry {
  std::string file;  // relative to the output directory
  std::string method;
  std::uint64_t seed = 0;
  LedgerSnapshot cost;
};

// Runs every requested method for every seed and writes CSV and/or JSON
// files under out_dir/seed_<seed>/, plus out_dir/manifest.json. The data is
// split into n_train context rows and n_inf labelled inference rows, which
// double as the validation set for data valuation.
//
// Throws ConfigError for unknown method names and conflicting settings
// (for example sensitivity with a non-differentiable risk).
std::vector<ManifestEntry> RunExplain(const ExperimentConfig& config,
                                      const PredictorFactory& factory);

std::string ManifestJson(const ExperimentConfig& config, const std::vector<ManifestEntry>& entries);

}  // namespace ctximl

#endif  // CTXIML_EXPLAIN_H_
