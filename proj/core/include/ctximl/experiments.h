#ifndef CTXIML_EXPERIMENTS_H_
#define CTXIML_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ctximl/config.h"
#include "ctximl/cost.h"
#include "ctximl/dataset.h"
#include "ctximl/predictor.h"

namespace ctximl {

// Creates a fresh predictor (own ledger, own session for external
// backends). Runners create one per seed so ledgers never mix.
using PredictorFactory = std::function<std::unique_ptr<Predictor>()>;
PredictorFactory MakePredictorFactory(const BackendConfig& backend);

struct ResultRecord {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> keys;  // configuration of this row
  std::vector<std::pair<std::string, double>> metrics;    // deterministic
  std::vector<std::pair<std::string, double>> timings;    // wall-clock, ms
  LedgerSnapshot cost;

  double Metric(const std::string& name) const;
  const std::string& Key(const std::string& name) const;
};

// The dataset named by the config: the CSV file, or the synthetic task with
// the given seed and row count.
Dataset LoadExperimentData(const ExperimentConfig& config, std::uint64_t seed, Eigen::Index n);

// Shuffles rows with `seed` and cuts consecutive blocks of the given sizes.
std::vector<Dataset> SplitDataset(const Dataset& data, const std::vector<Eigen::Index>& sizes,
                                  std::uint64_t seed);

// Standardizes every split with statistics of the first one.
std::vector<Dataset> StandardizeSplits(const std::vector<Dataset>& splits);

// Batched vs per-grid-point PD over dataset_sizes x grid_sizes. Throws
// std::runtime_error if the two curves differ by more than 1e-12.
std::vector<ResultRecord> RunPdRuntime(const ExperimentConfig& config,
                                       const PredictorFactory& factory);

// Kernel SHAP error against brute-force Shapley values, exact mode over the
// coalition grid and approximate mode over coalition x imputation grids.
std::vector<ResultRecord> RunShapError(const ExperimentConfig& config,
                                       const PredictorFactory& factory);

// Data-Shapley context vs a random sketch of equal size; two rows per seed.
std::vector<ResultRecord> RunContextOpt(const ExperimentConfig& config,
                                        const PredictorFactory& factory);

struct ShapErrorSummaryRow {
  std::string mode;  // exact or approx
  int coalitions = 0;
  int imputation_samples = 0;  // 0 for exact
  std::uint64_t token_connections = 0;
  double mean_error = 0.0;
  double sd_error = 0.0;  // sample standard deviation over seeds
  int seeds = 0;
};

std::vector<ShapErrorSummaryRow> SummarizeShapError(const std::vector<ResultRecord>& records);

// Share of exact-mode budgets B at which exact mode has mean error <= every
// approximate configuration costing at most B, and sd <= the approximate
// configuration with the largest budget not above B. Budgets with no
// affordable approximate configuration are left out of both shares.
struct BudgetDominance {
  int budgets = 0;
  int mean_wins = 0;
  int sd_wins = 0;
  double mean_share() const { return budgets ? double(mean_wins) / budgets : 0.0; }
  double sd_share() const { return budgets ? double(sd_wins) / budgets : 0.0; }
};
BudgetDominance ComputeBudgetDominance(const std::vector<ShapErrorSummaryRow>& summary);

std::string ShapErrorSummaryCsv(const std::vector<ShapErrorSummaryRow>& summary);

// experiment,seed,<keys>,token_connections,evaluation_calls,<metrics>
std::string RecordsCsv(const std::vector<ResultRecord>& records);
// experiment,seed,<keys>,<timings>; empty when no record carries timings.
std::string TimingCsv(const std::vector<ResultRecord>& records);
std::string RecordsJson(const ExperimentConfig& config, const std::vector<ResultRecord>& records);

// Writes results.csv / results.json (per config.format), timing.csv and
// summary files into config.out_dir. Returns the written paths.
std::vector<std::filesystem::path> WriteExperimentOutputs(const ExperimentConfig& config,
                                                          const std::vector<ResultRecord>& records);

}  // namespace ctximl

#endif  // CTXIML_EXPERIMENTS_H_
