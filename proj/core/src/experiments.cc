#include "ctximl/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "ctximl/csv.h"
#include "ctximl/data_valuation.h"
#include "ctximl/errors.h"
#include "ctximl/external_predictor.h"
#include "ctximl/feature_effects.h"
#include "ctximl/parallel.h"
#include "ctximl/reference_predictor.h"
#include "ctximl/rng.h"
#include "ctximl/serialize.h"
#include "ctximl/shapley.h"
#include "json.hpp"

namespace ctximl {
namespace {

enum StreamPurpose : std::uint64_t { kSplit = 31, kSketchSeed = 32 };

using Clock = std::chrono::steady_clock;

double ElapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Runs fn(seed_index) for every seed and concatenates the per-seed records
// in seed-list order.
template <typename Fn>
std::vector<ResultRecord> ForEachSeed(const ExperimentConfig& config, Fn&& fn) {
  std::vector<std::vector<ResultRecord>> per_seed(config.seeds.size());
  ParallelFor(config.seeds.size(), static_cast<std::size_t>(config.threads),
              [&](std::size_t i) { per_seed[i] = fn(config.seeds[i]); });
  std::vector<ResultRecord> out;
  for (auto& block : per_seed)
    for (auto& r : block) out.push_back(std::move(r));
  return out;
}

std::string Header(const std::vector<ResultRecord>& records, bool timing) {
  const ResultRecord& first = records.front();
  std::string out = "experiment,seed";
  for (const auto& [k, v] : first.keys) out += "," + k;
  if (timing) {
    for (const auto& [k, v] : first.timings) out += "," + k;
  } else {
    out += ",token_connections,evaluation_calls";
    for (const auto& [k, v] : first.metrics) out += "," + k;
  }
  return out + "\n";
}

}  // namespace

double ResultRecord::Metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  throw std::out_of_range("no metric " + name);
}

const std::string& ResultRecord::Key(const std::string& name) const {
  for (const auto& [k, v] : keys)
    if (k == name) return v;
  throw std::out_of_range("no key " + name);
}

PredictorFactory MakePredictorFactory(const BackendConfig& backend) {
  if (backend.kind == BackendKind::kReference) {
    const double h = backend.bandwidth;
    return [h] { return std::make_unique<ReferencePredictor>(h); };
  }
  const std::vector<std::string> argv = SplitCommandLine(backend.external_command);
  if (argv.empty()) throw ConfigError("external backend needs a command");
  return [argv]() -> std::unique_ptr<Predictor> { return ExternalPredictor::Launch(argv); };
}

Dataset LoadExperimentData(const ExperimentConfig& config, std::uint64_t seed, Eigen::Index n) {
  if (!config.csv_path.empty()) return LoadCsv(config.csv_path, config.label_column);
  SynthSpec spec = config.synth;
  spec.seed = seed;
  spec.n = n;
  return SynthGenerate(spec);
}

std::vector<Dataset> SplitDataset(const Dataset& data, const std::vector<Eigen::Index>& sizes,
                                  std::uint64_t seed) {
  Eigen::Index total = 0;
  for (Eigen::Index s : sizes) {
    if (s < 0) throw ContractError("split: negative size");
    total += s;
  }
  if (total > data.rows())
    throw ConfigError("split: need " + std::to_string(total) + " rows, dataset has " +
                      std::to_string(data.rows()));
  std::vector<std::size_t> order(static_cast<std::size_t>(data.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng::Stream(seed, 0, kSplit);
  rng.Shuffle(order);
  std::vector<Dataset> out;
  std::size_t start = 0;
  for (Eigen::Index s : sizes) {
    std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                  order.begin() + static_cast<std::ptrdiff_t>(start + s));
    out.push_back(SelectRows(data, rows));
    start += static_cast<std::size_t>(s);
  }
  return out;
}

std::vector<Dataset> StandardizeSplits(const std::vector<Dataset>& splits) {
  if (splits.empty()) return {};
  const Standardizer standardizer = Standardizer::Fit(splits.front().features());
  std::vector<Dataset> out;
  for (const Dataset& d : splits) out.push_back(standardizer.Apply(d));
  return out;
}

std::vector<ResultRecord> RunPdRuntime(const ExperimentConfig& config,
                                       const PredictorFactory& factory) {
  ValidateConfig(config);
  return ForEachSeed(config, [&](std::uint64_t seed) {
    std::vector<ResultRecord> records;
    auto predictor = factory();
    for (int n : config.dataset_sizes) {
      const auto n_train = static_cast<Eigen::Index>(std::llround(config.train_fraction * n));
      const Eigen::Index n_inf = n - n_train;
      if (n_train < 1 || n_inf < 1) throw ConfigError("pd_runtime: dataset too small to split");
      const auto splits =
          StandardizeSplits(SplitDataset(LoadExperimentData(config, seed, n), {n_train, n_inf}, seed));
      const Dataset& train = splits[0];
      const Matrix& inference = splits[1].features();
      for (int g : config.grid_sizes) {
        const GridSpec grid = BuildGrid(inference.col(0), g, GridStrategy::kUniform, 0);
        std::vector<double> batched_ms, naive_ms;
        EffectCurve batched, naive;
        LedgerSnapshot batched_cost, naive_cost;
        for (int rep = 0; rep < config.repetitions; ++rep) {
          LedgerSnapshot before = predictor->ledger().Snapshot();
          Clock::time_point start = Clock::now();
          batched = PartialDependence(*predictor, train, inference, grid);
          batched_ms.push_back(ElapsedMs(start));
          batched_cost = predictor->ledger().Snapshot() - before;

          before = predictor->ledger().Snapshot();
          start = Clock::now();
          naive = PartialDependenceNaive(*predictor, train, inference, grid);
          naive_ms.push_back(ElapsedMs(start));
          naive_cost = predictor->ledger().Snapshot() - before;
        }
        const double diff = (batched.values - naive.values).cwiseAbs().maxCoeff();
        if (!(diff <= 1e-12))
          throw std::runtime_error("pd_runtime: batched and naive curves differ by " +
                                   FormatDouble(diff));

        ResultRecord r;
        r.experiment = "pd_runtime";
        r.seed = seed;
        r.keys = {{"n", std::to_string(n)},
                  {"n_train", std::to_string(n_train)},
                  {"n_inf", std::to_string(n_inf)},
                  {"G", std::to_string(grid.points.size())}};
        r.metrics = {{"max_abs_diff", diff},
                     {"naive_token_connections", double(naive_cost.token_connections)},
                     {"naive_evaluation_calls", double(naive_cost.evaluation_calls)},
                     {"ledger_ratio", double(naive_cost.token_connections) /
                                          double(batched_cost.token_connections)}};
        r.timings = {{"batched_ms_median", Median(batched_ms)},
                     {"naive_ms_median", Median(naive_ms)}};
        for (std::size_t k = 0; k < batched_ms.size(); ++k)
          r.timings.emplace_back("batched_ms_" + std::to_string(k), batched_ms[k]);
        for (std::size_t k = 0; k < naive_ms.size(); ++k)
          r.timings.emplace_back("naive_ms_" + std::to_string(k), naive_ms[k]);
        r.cost = batched_cost;
        records.push_back(std::move(r));
      }
    }
    return records;
  });
}

std::vector<ResultRecord> RunShapError(const ExperimentConfig& config,
                                       const PredictorFactory& factory) {
  ValidateConfig(config);
  return ForEachSeed(config, [&](std::uint64_t seed) {
    auto predictor = factory();
    const auto splits = StandardizeSplits(
        SplitDataset(LoadExperimentData(config, seed, config.n_train + config.n_inf),
                     {config.n_train, config.n_inf}, seed));
    const Dataset& train = splits[0];
    const Matrix& inference = splits[1].features();
    const Matrix truth = ExactShapleyBruteforce(*predictor, train, inference);

    std::vector<ResultRecord> records;
    auto run = [&](int m, const RetrainMode& mode) {
      KernelShapOptions options;
      options.num_coalitions = m;
      options.mode = mode;
      options.seed = seed;
      const AttributionResult result = KernelShap(*predictor, train, inference, options);
      ResultRecord r;
      r.experiment = "shap_error";
      r.seed = seed;
      r.keys = {{"mode", mode.is_exact() ? "exact" : "approx"},
                {"M", std::to_string(m)},
                {"L", std::to_string(mode.is_exact() ? 0 : mode.imputation_samples())}};
      r.metrics = {{"error", ShapErrorMetric(result, truth)},
                   {"condition_number", result.diagnostics.condition_number}};
      r.cost = result.diagnostics.cost;
      records.push_back(std::move(r));
    };
    for (int m : config.coalition_grid) run(m, RetrainMode::Exact());
    for (int m : config.coalition_grid)
      for (int l : config.imputation_grid) run(m, RetrainMode::Approximate(l));
    return records;
  });
}

std::vector<ResultRecord> RunContextOpt(const ExperimentConfig& config,
                                        const PredictorFactory& factory) {
  ValidateConfig(config);
  return ForEachSeed(config, [&](std::uint64_t seed) {
    auto predictor = factory();
    const Eigen::Index total = config.n_train + config.n_val + config.n_test;
    const auto splits = StandardizeSplits(SplitDataset(
        LoadExperimentData(config, seed, total), {config.n_train, config.n_val, config.n_test},
        seed));
    const Dataset& train = splits[0];
    const Dataset& validation = splits[1];
    const Dataset& test = splits[2];

    ContextConfig context;
    context.num_subsets = config.num_subsets;
    context.context_size = config.n_sub;
    context.min_subset_size = config.size_min;
    context.seed = seed;
    context.risk = config.risk;

    std::vector<ResultRecord> records;
    auto evaluate = [&](const std::string& method, const ObservationSubset& selected,
                        const LedgerSnapshot& selection_cost) {
      const LedgerSnapshot before = predictor->ledger().Snapshot();
      const Vector scores =
          predictor->Predict(RestrictObservations(train, selected), test.features()).probabilities;
      const double auc = RocAuc(scores, test.labels());
      ResultRecord r;
      r.experiment = "context_opt";
      r.seed = seed;
      r.keys = {{"method", method}, {"n_sub", std::to_string(config.n_sub)}};
      r.metrics = {{"roc_auc", auc}, {"one_minus_auc", 1.0 - auc}};
      r.cost = selection_cost + (predictor->ledger().Snapshot() - before);
      records.push_back(std::move(r));
    };
    const ContextSelection selection = DataShapleyContext(*predictor, train, validation, context);
    evaluate("data_shapley", selection.selected, selection.cost);
    evaluate("random_sketch",
             RandomSketch(train.rows(), config.n_sub, Rng::Mix(seed, kSketchSeed)), {});
    return records;
  });
}

std::vector<ShapErrorSummaryRow> SummarizeShapError(const std::vector<ResultRecord>& records) {
  using Key = std::tuple<int, int, int>;  // exact first, then M, L
  std::map<Key, std::vector<const ResultRecord*>> groups;
  for (const ResultRecord& r : records) {
    if (r.experiment != "shap_error") continue;
    const int approx = r.Key("mode") == "approx";
    groups[{approx, std::stoi(r.Key("M")), std::stoi(r.Key("L"))}].push_back(&r);
  }
  std::vector<ShapErrorSummaryRow> out;
  for (const auto& [key, rows] : groups) {
    ShapErrorSummaryRow s;
    s.mode = std::get<0>(key) ? "approx" : "exact";
    s.coalitions = std::get<1>(key);
    s.imputation_samples = std::get<2>(key);
    s.token_connections = rows.front()->cost.token_connections;
    s.seeds = static_cast<int>(rows.size());
    double sum = 0.0;
    for (const ResultRecord* r : rows) {
      if (r->cost.token_connections != s.token_connections)
        throw std::runtime_error("shap_error: token budget differs across seeds");
      sum += r->Metric("error");
    }
    s.mean_error = sum / s.seeds;
    double ss = 0.0;
    for (const ResultRecord* r : rows) ss += std::pow(r->Metric("error") - s.mean_error, 2);
    s.sd_error = s.seeds > 1 ? std::sqrt(ss / (s.seeds - 1)) : 0.0;
    out.push_back(s);
  }
  return out;
}

BudgetDominance ComputeBudgetDominance(const std::vector<ShapErrorSummaryRow>& summary) {
  BudgetDominance d;
  for (const ShapErrorSummaryRow& exact : summary) {
    if (exact.mode != "exact") continue;
    double best_mean = std::numeric_limits<double>::infinity();
    const ShapErrorSummaryRow* matched = nullptr;
    for (const ShapErrorSummaryRow& approx : summary) {
      if (approx.mode != "approx" || approx.token_connections > exact.token_connections) continue;
      best_mean = std::min(best_mean, approx.mean_error);
      if (!matched || approx.token_connections > matched->token_connections) matched = &approx;
    }
    if (!matched) continue;
    ++d.budgets;
    if (exact.mean_error <= best_mean) ++d.mean_wins;
    if (exact.sd_error <= matched->sd_error) ++d.sd_wins;
  }
  return d;
}

std::string ShapErrorSummaryCsv(const std::vector<ShapErrorSummaryRow>& summary) {
  std::string out = "mode,M,L,token_connections,mean_error,sd_error,seeds\n";
  for (const auto& s : summary)
    out += s.mode + "," + std::to_string(s.coalitions) + "," +
           std::to_string(s.imputation_samples) + "," + std::to_string(s.token_connections) +
           "," + FormatDouble(s.mean_error) + "," + FormatDouble(s.sd_error) + "," +
           std::to_string(s.seeds) + "\n";
  return out;
}

std::string RecordsCsv(const std::vector<ResultRecord>& records) {
  if (records.empty()) return "";
  std::string out = Header(records, false);
  for (const ResultRecord& r : records) {
    out += r.experiment + "," + std::to_string(r.seed);
    for (const auto& [k, v] : r.keys) out += "," + v;
    out += "," + std::to_string(r.cost.token_connections) + "," +
           std::to_string(r.cost.evaluation_calls);
    for (const auto& [k, v] : r.metrics) out += "," + FormatDouble(v);
    out += "\n";
  }
  return out;
}

std::string TimingCsv(const std::vector<ResultRecord>& records) {
  if (records.empty() || records.front().timings.empty()) return "";
  std::string out = Header(records, true);
  for (const ResultRecord& r : records) {
    out += r.experiment + "," + std::to_string(r.seed);
    for (const auto& [k, v] : r.keys) out += "," + v;
    for (const auto& [k, v] : r.timings) out += "," + FormatDouble(v);
    out += "\n";
  }
  return out;
}

std::string RecordsJson(const ExperimentConfig& config, const std::vector<ResultRecord>& records) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& [k, v] : DescribeConfig(config)) echo[k] = v;
  j["config"] = std::move(echo);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ResultRecord& r : records) {
    nlohmann::ordered_json row;
    row["experiment"] = r.experiment;
    row["seed"] = r.seed;
    for (const auto& [k, v] : r.keys) row["keys"][k] = v;
    row["ledger"] = {{"token_connections", r.cost.token_connections},
                     {"evaluation_calls", r.cost.evaluation_calls}};
    for (const auto& [k, v] : r.metrics) row["metrics"][k] = v;
    rows.push_back(std::move(row));
  }
  j["records"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> WriteExperimentOutputs(
    const ExperimentConfig& config, const std::vector<ResultRecord>& records) {
  const std::filesystem::path dir(config.out_dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& name, const std::string& content) {
    if (content.empty()) return;
    WriteTextFile(dir / name, content);
    written.push_back(dir / name);
  };
  if (config.format != OutputFormat::kJson) write("results.csv", RecordsCsv(records));
  if (config.format != OutputFormat::kCsv) write("results.json", RecordsJson(config, records));
  write("timing.csv", TimingCsv(records));
  if (config.experiment == ExperimentKind::kShapError) {
    const auto summary = SummarizeShapError(records);
    write("summary.csv", ShapErrorSummaryCsv(summary));
    const BudgetDominance d = ComputeBudgetDominance(summary);
    write("dominance.csv", "budgets,mean_wins,sd_wins,mean_share,sd_share\n" +
                               std::to_string(d.budgets) + "," + std::to_string(d.mean_wins) +
                               "," + std::to_string(d.sd_wins) + "," +
                               FormatDouble(d.mean_share()) + "," + FormatDouble(d.sd_share()) +
                               "\n");
  }
  return written;
}

}  // namespace ctximl
