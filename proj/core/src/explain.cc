#include "ctximl/explain.h"

#include <algorithm>

#include "ctximl/data_valuation.h"
#include "ctximl/errors.h"
#include "ctximl/feature_effects.h"
#include "ctximl/importance.h"
#include "ctximl/parallel.h"
#include "ctximl/serialize.h"
#include "ctximl/shapley.h"
#include "json.hpp"

namespace ctximl {
namespace {

bool Wants(const ExperimentConfig& config, std::string_view method) {
  return std::find(config.methods.begin(), config.methods.end(), method) != config.methods.end();
}

void CheckMethods(const ExperimentConfig& config) {
  for (const std::string& m : config.methods) {
    const auto& known = ExplainMethods();
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw ConfigError("explain: unknown method '" + m + "'");
  }
  if (Wants(config, "sensitivity") && !IsDifferentiable(config.risk))
    throw ConfigError("explain: sensitivity needs a differentiable risk, got " +
                      std::string(RiskName(config.risk)));
  if (config.imputation_samples > 0 && config.imputation_samples > config.n_train)
    throw ConfigError("explain: imputation_samples exceeds n_train");
}

class SeedWriter {
 public:
  SeedWriter(const ExperimentConfig& config, std::uint64_t seed, const Predictor& predictor)
      : config_(config), seed_(seed), predictor_(predictor),
        subdir_("seed_" + std::to_string(seed)) {}

  // Cost of the work since the previous Mark().
  LedgerSnapshot Mark() {
    const LedgerSnapshot now = predictor_.ledger().Snapshot();
    const LedgerSnapshot delta = now - last_;
    last_ = now;
    return delta;
  }

  void Emit(const std::string& method, const std::string& stem, const std::string& csv,
            const std::string& json, const LedgerSnapshot& cost) {
    if (config_.format != OutputFormat::kJson && !csv.empty()) Write(method, stem + ".csv", csv, cost);
    if (config_.format != OutputFormat::kCsv && !json.empty())
      Write(method, stem + ".json", json, cost);
  }

  std::vector<ManifestEntry> entries;

 private:
  void Write(const std::string& method, const std::string& name, const std::string& content,
             const LedgerSnapshot& cost) {
    const std::string rel = subdir_ + "/" + name;
    WriteTextFile(std::filesystem::path(config_.out_dir) / rel, content);
    entries.push_back({rel, method, seed_, cost});
  }

  const ExperimentConfig& config_;
  std::uint64_t seed_;
  const Predictor& predictor_;
  std::string subdir_;
  LedgerSnapshot last_;
};

std::string FeatureEffectsCsv(const Matrix& effects, const std::vector<std::string>& names) {
  std::string out = "inference_id,feature,sensitivity\n";
  for (Eigen::Index k = 0; k < effects.cols(); ++k)
    for (Eigen::Index j = 0; j < effects.rows(); ++j)
      out += std::to_string(k) + "," + names[std::size_t(j)] + "," + FormatDouble(effects(j, k)) +
             "\n";
  return out;
}

std::vector<ManifestEntry> ExplainSeed(const ExperimentConfig& config, std::uint64_t seed,
                                       const Predictor& predictor) {
  const auto splits = StandardizeSplits(
      SplitDataset(LoadExperimentData(config, seed, config.n_train + config.n_inf),
                   {config.n_train, config.n_inf}, seed));
  const Dataset& train = splits[0];
  const Dataset& inference = splits[1];
  const std::vector<std::string>& names = train.column_names();
  const auto p = static_cast<int>(train.cols());

  std::vector<int> features = config.features;
  if (features.empty())
    for (int j = 0; j < p; ++j) features.push_back(j);
  for (int j : features)
    if (j < 0 || j >= p) throw ConfigError("explain: feature index " + std::to_string(j) + " out of range");

  SeedWriter out(config, seed, predictor);
  out.Mark();
  for (int j : features) {
    const std::string& name = names[std::size_t(j)];
    const GridSpec grid =
        BuildGrid(inference.features().col(j), config.grid_points, config.grid_strategy, j);
    const std::pair<const char*, EffectKind> kinds[] = {
        {"ice", EffectKind::kIce}, {"pd", EffectKind::kPd}, {"ale", EffectKind::kAle}};
    for (const auto& [method, kind] : kinds) {
      if (!Wants(config, method)) continue;
      EffectCurve curve;
      if (kind == EffectKind::kIce) curve = Ice(predictor, train, inference.features(), grid);
      if (kind == EffectKind::kPd)
        curve = PartialDependence(predictor, train, inference.features(), grid);
      if (kind == EffectKind::kAle) curve = Ale(predictor, train, inference.features(), grid);
      const LedgerSnapshot cost = out.Mark();
      out.Emit(method, std::string(method) + "_" + name, EffectCurveCsv(curve),
               EffectCurveJson(curve, name), cost);
    }
  }

  if (Wants(config, "kernel_shap")) {
    KernelShapOptions options;
    options.num_coalitions = config.coalitions;
    options.mode = config.imputation_samples > 0
                       ? RetrainMode::Approximate(config.imputation_samples)
                       : RetrainMode::Exact();
    options.seed = seed;
    const AttributionResult result = KernelShap(predictor, train, inference.features(), options);
    const LedgerSnapshot cost = out.Mark();
    out.Emit("kernel_shap", "kernel_shap", AttributionCsv(result, names),
             AttributionJson(result, names), cost);
  }
  if (Wants(config, "loco")) {
    const ImportanceReport report = Loco(predictor, train, inference, config.risk);
    const LedgerSnapshot cost = out.Mark();
    out.Emit("loco", "loco", ImportanceCsv(report, names), ImportanceJson(report, names), cost);
  }
  if (Wants(config, "sage")) {
    const ImportanceReport report =
        Sage(predictor, train, inference, config.coalitions, config.risk, seed);
    const LedgerSnapshot cost = out.Mark();
    out.Emit("sage", "sage", ImportanceCsv(report, names), ImportanceJson(report, names), cost);
  }
  if (Wants(config, "loo")) {
    const DataValueReport report = Loo(predictor, train, inference, config.risk);
    const LedgerSnapshot cost = out.Mark();
    out.Emit("loo", "loo", DataValueCsv(report), DataValueJson(report), cost);
  }
  if (Wants(config, "data_shapley")) {
    ContextConfig context;
    context.num_subsets = config.num_subsets;
    context.context_size = config.n_sub;
    context.min_subset_size = config.size_min;
    context.seed = seed;
    context.risk = config.risk;
    const ContextSelection selection = DataShapleyContext(predictor, train, inference, context);
    const LedgerSnapshot cost = out.Mark();
    out.Emit("data_shapley", "data_shapley", ContextSelectionCsv(selection),
             ContextSelectionJson(selection), cost);
  }
  if (Wants(config, "sensitivity")) {
    const DataValueReport report = SensitivityDataValues(predictor, train, inference, config.risk);
    const Matrix effects = SensitivityFeatureEffects(predictor, train, inference.features());
    const LedgerSnapshot cost = out.Mark();
    out.Emit("sensitivity", "sensitivity_data", DataValueCsv(report), DataValueJson(report), cost);
    out.Emit("sensitivity", "sensitivity_features", FeatureEffectsCsv(effects, names), "", {});
  }
  return out.entries;
}

}  // namespace

const std::vector<std::string>& ExplainMethods() {
  static const std::vector<std::string> methods = {"ice",  "pd",  "ale",          "kernel_shap",
                                                   "loco", "sage", "loo", "data_shapley",
                                                   "sensitivity"};
  return methods;
}

std::vector<ManifestEntry> RunExplain(const ExperimentConfig& config,
                                      const PredictorFactory& factory) {
  ValidateConfig(config);
  CheckMethods(config);
  std::vector<std::vector<ManifestEntry>> per_seed(config.seeds.size());
  ParallelFor(config.seeds.size(), static_cast<std::size_t>(config.threads), [&](std::size_t i) {
    auto predictor = factory();
    per_seed[i] = ExplainSeed(config, config.seeds[i], *predictor);
  });
  std::vector<ManifestEntry> entries;
  for (auto& block : per_seed) entries.insert(entries.end(), block.begin(), block.end());
  WriteTextFile(std::filesystem::path(config.out_dir) / "manifest.json",
                ManifestJson(config, entries));
  return entries;
}

std::string ManifestJson(const ExperimentConfig& config,
                         const std::vector<ManifestEntry>& entries) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& [k, v] : DescribeConfig(config)) echo[k] = v;
  j["config"] = std::move(echo);
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const ManifestEntry& e : entries) {
    files.push_back({{"file", e.file},
                     {"method", e.method},
                     {"seed", e.seed},
                     {"token_connections", e.cost.token_connections},
                     {"evaluation_calls", e.cost.evaluation_calls}});
  }
  j["files"] = std::move(files);
  return j.dump(2) + "\n";
}

}  // namespace ctximl
