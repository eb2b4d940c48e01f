// ctximl command-line front end.
#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ctximl/config.h"
#include "ctximl/errors.h"
#include "ctximl/experiments.h"
#include "ctximl/explain.h"
#include "ctximl/serialize.h"
#include "ctximl/synth.h"

namespace {

using ctximl::ExperimentConfig;
using ctximl::ExperimentKind;

constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;

// Flag name -> config key. Every flag is a plain string parsed by
// ApplyConfigValue so the config file and the command line share one parser.
const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"--backend", "backend"},
    {"--external-cmd", "external_cmd"},
    {"--bandwidth", "bandwidth"},
    {"--seed", "seeds"},
    {"--out-dir", "out_dir"},
    {"--risk", "risk"},
    {"--format", "format"},
    {"--threads", "threads"},
    {"--csv", "csv"},
    {"--label-column", "label_column"},
    {"--task", "task"},
    {"--n", "n"},
    {"--p", "p"},
    {"--noise-rate", "noise_rate"},
    {"--n-train", "n_train"},
    {"--n-inf", "n_inf"},
    {"--methods", "methods"},
    {"--features", "features"},
    {"--grid-points", "grid_points"},
    {"--grid-strategy", "grid_strategy"},
    {"--coalitions", "coalitions"},
    {"--imputation-samples", "imputation_samples"},
    {"--grid-sizes", "grid_sizes"},
    {"--dataset-sizes", "dataset_sizes"},
    {"--repetitions", "repetitions"},
    {"--coalition-grid", "coalition_grid"},
    {"--imputation-grid", "imputation_grid"},
    {"--n-sub", "n_sub"},
    {"--size-min", "size_min"},
    {"--n-val", "n_val"},
    {"--n-test", "n_test"},
    {"--num-subsets", "num_subsets"},
};

ExperimentConfig BuildConfig(ExperimentKind kind, const std::string& config_file,
                             const std::vector<std::pair<std::string, std::string>>& overrides,
                             const std::vector<std::string>& sets) {
  ExperimentConfig config = ctximl::ExperimentDefaults(kind);
  if (!config_file.empty()) {
    for (const auto& [key, value] : ctximl::ReadKeyValueFile(config_file)) {
      if (key == "experiment") {
        ExperimentConfig probe = config;
        ctximl::ApplyConfigValue(probe, key, value);
        if (probe.experiment != kind)
          throw ctximl::ConfigError("config file is for experiment '" +
                                    std::string(ctximl::ExperimentName(probe.experiment)) +
                                    "', command runs '" +
                                    std::string(ctximl::ExperimentName(kind)) + "'");
        continue;
      }
      ctximl::ApplyConfigValue(config, key, value);
    }
  }
  for (const auto& [key, value] : overrides) ctximl::ApplyConfigValue(config, key, value);
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ctximl::ConfigError("--set expects key=value, got " + s);
    ctximl::ApplyConfigValue(config, s.substr(0, eq), s.substr(eq + 1));
  }
  ctximl::ValidateConfig(config);
  return config;
}

void PrintWritten(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

int RunVerb(const std::string& verb, const ExperimentConfig& config, const std::string& output) {
  if (verb == "synth") {
    ctximl::SynthSpec spec = config.synth;
    spec.seed = config.seeds.front();
    const std::string path =
        output.empty() ? (std::filesystem::path(config.out_dir) / "synth.csv").string() : output;
    ctximl::WriteTextFile(path, ctximl::DatasetCsv(ctximl::SynthGenerate(spec)));
    std::cout << "wrote " << path << "\n";
    return 0;
  }
  const auto factory = ctximl::MakePredictorFactory(config.backend);
  if (verb == "explain") {
    const auto entries = ctximl::RunExplain(config, factory);
    std::cout << "wrote " << entries.size() << " files and manifest.json to " << config.out_dir
              << "\n";
    return 0;
  }
  std::vector<ctximl::ResultRecord> records;
  if (verb == "bench-pd") records = ctximl::RunPdRuntime(config, factory);
  if (verb == "bench-shap") records = ctximl::RunShapError(config, factory);
  if (verb == "bench-context") records = ctximl::RunContextOpt(config, factory);
  PrintWritten(ctximl::WriteExperimentOutputs(config, records));

  if (verb == "bench-shap") {
    const auto d = ctximl::ComputeBudgetDominance(ctximl::SummarizeShapError(records));
    std::printf("budget dominance: mean %d/%d (%.2f), sd %d/%d (%.2f)\n", d.mean_wins, d.budgets,
                d.mean_share(), d.sd_wins, d.budgets, d.sd_share());
  } else if (verb == "bench-context") {
    for (std::size_t i = 0; i + 1 < records.size(); i += 2)
      std::printf("seed %llu: data_shapley auc %.4f, random_sketch auc %.4f\n",
                  static_cast<unsigned long long>(records[i].seed),
                  records[i].Metric("roc_auc"), records[i + 1].Metric("roc_auc"));
  } else if (verb == "bench-pd") {
    for (const auto& r : records)
      std::printf("n=%s G=%s ledger ratio %.3f, batched %.2f ms, naive %.2f ms\n",
                  r.Key("n").c_str(), r.Key("G").c_str(), r.Metric("ledger_ratio"),
                  r.timings[0].second, r.timings[1].second);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpretability methods for in-context learners"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::string output;
  std::vector<std::string> sets;
  std::vector<std::string> values(kFlags.size());
  app.add_option("--config", config_file, "TOML-style key = value file");
  app.add_option("--set", sets, "Override any config key (key=value)");
  for (std::size_t i = 0; i < kFlags.size(); ++i)
    app.add_option(kFlags[i].first, values[i], "config key " + kFlags[i].second);

  const std::vector<std::pair<std::string, std::string>> verbs = {
      {"explain", "Effects, attributions, importance and data values for one dataset"},
      {"bench-pd", "Batched vs per-grid-point partial dependence runtime"},
      {"bench-shap", "Kernel SHAP error against token budget"},
      {"bench-context", "Data-Shapley context selection vs random sketch"},
      {"synth", "Write a synthetic dataset as CSV"}};
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (name == "synth") sub->add_option("--output", output, "Output CSV path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (std::size_t i = 0; i < kFlags.size(); ++i)
      if (app.count(kFlags[i].first) > 0) overrides.emplace_back(kFlags[i].second, values[i]);
    ExperimentKind kind = ExperimentKind::kExplain;
    if (verb == "bench-pd") kind = ExperimentKind::kPdRuntime;
    if (verb == "bench-shap") kind = ExperimentKind::kShapError;
    if (verb == "bench-context") kind = ExperimentKind::kContextOpt;
    const ExperimentConfig config = BuildConfig(kind, config_file, overrides, sets);
    return RunVerb(verb, config, output);
  } catch (const ctximl::TransportError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ctximl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ctximl::ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
