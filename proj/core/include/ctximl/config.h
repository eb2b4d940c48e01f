#ifndef CTXIML_CONFIG_H_
#define CTXIML_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctximl/feature_effects.h"
#include "ctximl/risk.h"
#include "ctximl/synth.h"

namespace ctximl {

enum class ExperimentKind { kPdRuntime, kShapError, kContextOpt, kExplain };
std::string_view ExperimentName(ExperimentKind kind);
std::optional<ExperimentKind> ParseExperiment(std::string_view name);

enum class BackendKind { kReference, kExternal };
enum class OutputFormat { kCsv, kJson, kBoth };

struct BackendConfig {
  BackendKind kind = BackendKind::kReference;
  double bandwidth = 1.0;
  std::string external_command;
};

// Everything a runner needs. Defaults are the desk-scale settings of each
// experiment; ExperimentDefaults fills them in per experiment kind.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kExplain;

  // Data source: a CSV file when csv_path is set, otherwise `synth`.
  std::string csv_path;
  std::string label_column = "label";
  SynthSpec synth;

  std::vector<std::uint64_t> seeds{0};
  RiskKind risk = RiskKind::kLogLoss;
  BackendConfig backend;
  int threads = 1;

  // pd_runtime
  std::vector<int> grid_sizes;
  std::vector<int> dataset_sizes;
  int repetitions = 5;
  double train_fraction = 0.8;

  // shap_error
  std::vector<int> coalition_grid;
  std::vector<int> imputation_grid;

  // shared sizes
  int n_train = 0;
  int n_inf = 0;

  // context_opt
  int n_sub = 0;
  int size_min = 0;
  int n_val = 0;
  int n_test = 0;
  int num_subsets = 0;

  // explain
  std::vector<std::string> methods;
  std::vector<int> features;  // empty: every feature
  int grid_points = 16;
  GridStrategy grid_strategy = GridStrategy::kQuantile;
  int coalitions = 64;
  int imputation_samples = 0;  // 0: exact retraining

  std::string out_dir = "out";
  OutputFormat format = OutputFormat::kCsv;
};

ExperimentConfig ExperimentDefaults(ExperimentKind kind);

// Sets one key from its textual value. Keys match the ExperimentConfig
// field names (plus experiment, csv, task, n, p, noise_rate, backend,
// bandwidth, external_cmd, format). Lists are written [a, b, c] or a,b,c.
// Throws ConfigError for unknown keys and malformed values.
void ApplyConfigValue(ExperimentConfig& config, std::string_view key, std::string_view value);

// Parses "key = value" lines; '#' starts a comment, strings may be quoted.
// Returns the pairs in file order.
std::vector<std::pair<std::string, std::string>> ParseKeyValueText(std::string_view text);
std::vector<std::pair<std::string, std::string>> ReadKeyValueFile(
    const std::filesystem::path& path);

// Throws ConfigError when counts are not positive, the seed list is empty
// or sizes are inconsistent for the chosen experiment.
void ValidateConfig(const ExperimentConfig& config);

// Flat key/value listing used as the configuration echo in outputs.
std::vector<std::pair<std::string, std::string>> DescribeConfig(const ExperimentConfig& config);

}  // namespace ctximl

#endif  // CTXIML_CONFIG_H_
