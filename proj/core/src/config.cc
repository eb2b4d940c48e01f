#include "ctximl/config.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ctximl/errors.h"

namespace ctximl {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string Unquote(std::string_view s) {
  s = Trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    s = s.substr(1, s.size() - 2);
  return std::string(s);
}

[[noreturn]] void Bad(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("config: " + std::string(key) + " = '" + std::string(value) + "': " +
                    std::string(why));
}

template <typename T>
T ParseInteger(std::string_view key, std::string_view text) {
  const std::string s = Unquote(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) Bad(key, text, "not an integer");
  return value;
}

double ParseReal(std::string_view key, std::string_view text) {
  const std::string s = Unquote(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) Bad(key, text, "not a number");
  return value;
}

std::vector<std::string> ParseList(std::string_view text) {
  std::string_view s = Trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("config: unterminated list '" + std::string(text) + "'");
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  if (Trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(Unquote(s.substr(start, comma == s.npos ? s.npos : comma - start)));
    if (comma == s.npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::vector<T> ParseIntegerList(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : ParseList(text)) out.push_back(ParseInteger<T>(key, item));
  return out;
}

template <typename T>
std::string Join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>)
      out += values[i];
    else
      out += std::to_string(values[i]);
  }
  return out;
}

std::string Real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::uint64_t> Range(std::uint64_t n) {
  std::vector<std::uint64_t> out(n);
  for (std::uint64_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

}  // namespace

std::string_view ExperimentName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kPdRuntime:
      return "pd_runtime";
    case ExperimentKind::kShapError:
      return "shap_error";
    case ExperimentKind::kContextOpt:
      return "context_opt";
    case ExperimentKind::kExplain:
      return "explain";
  }
  return "unknown";
}

std::optional<ExperimentKind> ParseExperiment(std::string_view name) {
  for (ExperimentKind k : {ExperimentKind::kPdRuntime, ExperimentKind::kShapError,
                           ExperimentKind::kContextOpt, ExperimentKind::kExplain})
    if (ExperimentName(k) == name) return k;
  return std::nullopt;
}

ExperimentConfig ExperimentDefaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::kPdRuntime:
      c.synth = {.n = 1000, .p = 10, .task = SynthTask::kGaussianClusters};
      c.dataset_sizes = {250, 500, 1000};
      c.grid_sizes = {4, 8, 16, 32, 64};
      break;
    case ExperimentKind::kShapError:
      c.synth = {.n = 384, .p = 6, .task = SynthTask::kNoisyLinear};
      c.seeds = Range(25);
      c.n_train = 256;
      c.n_inf = 128;
      c.coalition_grid = {8, 10, 12, 16, 20, 24, 32, 40, 48, 62};
      c.imputation_grid = {1, 2, 5, 10};
      break;
    case ExperimentKind::kContextOpt:
      c.synth = {.n = 288, .p = 4, .task = SynthTask::kNoisyLinear, .noise_rate = 0.1};
      c.seeds = Range(5);
      c.n_train = 96;
      c.n_sub = 32;
      c.size_min = 8;
      c.n_val = 64;
      c.n_test = 128;
      c.num_subsets = 3 * 96;
      break;
    case ExperimentKind::kExplain:
      c.synth = {.n = 200, .p = 4, .task = SynthTask::kGaussianClusters};
      c.n_train = 150;
      c.n_inf = 50;
      c.n_sub = 50;
      c.size_min = 12;
      c.num_subsets = 450;
      c.methods = {"ice", "pd", "ale", "kernel_shap", "loco", "sage",
                   "loo", "data_shapley", "sensitivity"};
      break;
  }
  return c;
}

void ApplyConfigValue(ExperimentConfig& c, std::string_view key, std::string_view value) {
  const std::string v = Unquote(value);
  if (key == "experiment") {
    auto kind = ParseExperiment(v);
    if (!kind) Bad(key, value, "unknown experiment");
    c.experiment = *kind;
  } else if (key == "csv") {
    c.csv_path = v;
  } else if (key == "label_column") {
    c.label_column = v;
  } else if (key == "task") {
    auto task = ParseSynthTask(v);
    if (!task) Bad(key, value, "unknown synthetic task");
    c.synth.task = *task;
  } else if (key == "n") {
    c.synth.n = ParseInteger<Eigen::Index>(key, value);
  } else if (key == "p") {
    c.synth.p = ParseInteger<Eigen::Index>(key, value);
  } else if (key == "noise_rate") {
    c.synth.noise_rate = ParseReal(key, value);
  } else if (key == "separation") {
    c.synth.separation = ParseReal(key, value);
  } else if (key == "seeds" || key == "seed") {
    c.seeds = ParseIntegerList<std::uint64_t>(key, value);
  } else if (key == "risk") {
    auto risk = ParseRiskKind(v);
    if (!risk) Bad(key, value, "unknown risk");
    c.risk = *risk;
  } else if (key == "backend") {
    if (v == "reference")
      c.backend.kind = BackendKind::kReference;
    else if (v == "external")
      c.backend.kind = BackendKind::kExternal;
    else
      Bad(key, value, "expected reference or external");
  } else if (key == "bandwidth") {
    c.backend.bandwidth = ParseReal(key, value);
  } else if (key == "external_cmd") {
    c.backend.external_command = v;
  } else if (key == "threads") {
    c.threads = ParseInteger<int>(key, value);
  } else if (key == "grid_sizes") {
    c.grid_sizes = ParseIntegerList<int>(key, value);
  } else if (key == "dataset_sizes") {
    c.dataset_sizes = ParseIntegerList<int>(key, value);
  } else if (key == "repetitions") {
    c.repetitions = ParseInteger<int>(key, value);
  } else if (key == "train_fraction") {
    c.train_fraction = ParseReal(key, value);
  } else if (key == "coalition_grid") {
    c.coalition_grid = ParseIntegerList<int>(key, value);
  } else if (key == "imputation_grid") {
    c.imputation_grid = ParseIntegerList<int>(key, value);
  } else if (key == "n_train") {
    c.n_train = ParseInteger<int>(key, value);
  } else if (key == "n_inf") {
    c.n_inf = ParseInteger<int>(key, value);
  } else if (key == "n_sub") {
    c.n_sub = ParseInteger<int>(key, value);
  } else if (key == "size_min") {
    c.size_min = ParseInteger<int>(key, value);
  } else if (key == "n_val") {
    c.n_val = ParseInteger<int>(key, value);
  } else if (key == "n_test") {
    c.n_test = ParseInteger<int>(key, value);
  } else if (key == "num_subsets") {
    c.num_subsets = ParseInteger<int>(key, value);
  } else if (key == "methods") {
    c.methods = ParseList(value);
  } else if (key == "features") {
    c.features = ParseIntegerList<int>(key, value);
  } else if (key == "grid_points") {
    c.grid_points = ParseInteger<int>(key, value);
  } else if (key == "grid_strategy") {
    auto strategy = ParseGridStrategy(v);
    if (!strategy) Bad(key, value, "unknown grid strategy");
    c.grid_strategy = *strategy;
  } else if (key == "coalitions") {
    c.coalitions = ParseInteger<int>(key, value);
  } else if (key == "imputation_samples") {
    c.imputation_samples = ParseInteger<int>(key, value);
  } else if (key == "out_dir") {
    c.out_dir = v;
  } else if (key == "format") {
    if (v == "csv")
      c.format = OutputFormat::kCsv;
    else if (v == "json")
      c.format = OutputFormat::kJson;
    else if (v == "both")
      c.format = OutputFormat::kBoth;
    else
      Bad(key, value, "expected csv, json or both");
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> ParseKeyValueText(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == text.npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[')
      throw ConfigError("config: line " + std::to_string(line_no) + ": tables are not supported");
    const std::size_t eq = line.find('=');
    if (eq == line.npos)
      throw ConfigError("config: line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = Trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config: line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::string(key), std::string(Trim(line.substr(eq + 1))));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> ReadKeyValueFile(
    const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return ParseKeyValueText(buffer.str());
}

void ValidateConfig(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  auto all_positive = [](const std::vector<int>& v) {
    for (int x : v)
      if (x <= 0) return false;
    return true;
  };
  require(!c.seeds.empty(), "seed list is empty");
  require(c.threads >= 1, "threads must be positive");
  require(c.backend.bandwidth > 0.0, "bandwidth must be positive");
  require(c.backend.kind == BackendKind::kReference || !c.backend.external_command.empty(),
          "external backend needs external_cmd");
  require(c.synth.n >= 4 && c.synth.p >= 1, "synthetic data needs n >= 4 and p >= 1");
  switch (c.experiment) {
    case ExperimentKind::kPdRuntime:
      require(!c.grid_sizes.empty() && all_positive(c.grid_sizes), "grid_sizes must be positive");
      require(!c.dataset_sizes.empty() && all_positive(c.dataset_sizes),
              "dataset_sizes must be positive");
      require(c.repetitions >= 1, "repetitions must be positive");
      require(c.train_fraction > 0.0 && c.train_fraction < 1.0, "train_fraction outside (0, 1)");
      break;
    case ExperimentKind::kShapError:
      require(!c.coalition_grid.empty() && all_positive(c.coalition_grid),
              "coalition_grid must be positive");
      require(all_positive(c.imputation_grid), "imputation_grid must be positive");
      require(c.n_train >= 1 && c.n_inf >= 1, "n_train and n_inf must be positive");
      require(c.synth.p >= 2 && c.synth.p <= 20, "shap_error needs 2 <= p <= 20");
      break;
    case ExperimentKind::kContextOpt:
      require(c.n_train >= 1 && c.n_val >= 1 && c.n_test >= 1, "split sizes must be positive");
      require(c.size_min >= 1 && c.size_min < c.n_sub && c.n_sub < c.n_train,
              "need 1 <= size_min < n_sub < n_train");
      require(c.num_subsets >= 1, "num_subsets must be positive");
      break;
    case ExperimentKind::kExplain:
      require(!c.methods.empty(), "no methods selected");
      require(c.n_train >= 1 && c.n_inf >= 1, "n_train and n_inf must be positive");
      require(c.grid_points >= 2, "grid_points must be at least 2");
      require(c.coalitions >= 1, "coalitions must be positive");
      require(c.imputation_samples >= 0, "imputation_samples must be non-negative");
      break;
  }
}

std::vector<std::pair<std::string, std::string>> DescribeConfig(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("experiment", std::string(ExperimentName(c.experiment)));
  if (!c.csv_path.empty()) {
    out.emplace_back("csv", c.csv_path);
    out.emplace_back("label_column", c.label_column);
  } else {
    out.emplace_back("task", std::string(SynthTaskName(c.synth.task)));
    out.emplace_back("n", std::to_string(c.synth.n));
    out.emplace_back("p", std::to_string(c.synth.p));
    out.emplace_back("noise_rate", Real(c.synth.noise_rate));
  }
  out.emplace_back("seeds", Join(c.seeds));
  out.emplace_back("risk", std::string(RiskName(c.risk)));
  out.emplace_back("backend",
                   c.backend.kind == BackendKind::kReference ? "reference" : "external");
  if (c.backend.kind == BackendKind::kReference)
    out.emplace_back("bandwidth", Real(c.backend.bandwidth));
  else
    out.emplace_back("external_cmd", c.backend.external_command);
  switch (c.experiment) {
    case ExperimentKind::kPdRuntime:
      out.emplace_back("grid_sizes", Join(c.grid_sizes));
      out.emplace_back("dataset_sizes", Join(c.dataset_sizes));
      out.emplace_back("repetitions", std::to_string(c.repetitions));
      out.emplace_back("train_fraction", Real(c.train_fraction));
      break;
    case ExperimentKind::kShapError:
      out.emplace_back("n_train", std::to_string(c.n_train));
      out.emplace_back("n_inf", std::to_string(c.n_inf));
      out.emplace_back("coalition_grid", Join(c.coalition_grid));
      out.emplace_back("imputation_grid", Join(c.imputation_grid));
      break;
    case ExperimentKind::kContextOpt:
      out.emplace_back("n_train", std::to_string(c.n_train));
      out.emplace_back("n_sub", std::to_string(c.n_sub));
      out.emplace_back("size_min", std::to_string(c.size_min));
      out.emplace_back("n_val", std::to_string(c.n_val));
      out.emplace_back("n_test", std::to_string(c.n_test));
      out.emplace_back("num_subsets", std::to_string(c.num_subsets));
      break;
    case ExperimentKind::kExplain:
      out.emplace_back("n_train", std::to_string(c.n_train));
      out.emplace_back("n_inf", std::to_string(c.n_inf));
      out.emplace_back("methods", Join(c.methods));
      out.emplace_back("features", Join(c.features));
      out.emplace_back("grid_points", std::to_string(c.grid_points));
      out.emplace_back("grid_strategy", std::string(GridStrategyName(c.grid_strategy)));
      out.emplace_back("coalitions", std::to_string(c.coalitions));
      out.emplace_back("imputation_samples", std::to_string(c.imputation_samples));
      out.emplace_back("n_sub", std::to_string(c.n_sub));
      out.emplace_back("size_min", std::to_string(c.size_min));
      out.emplace_back("num_subsets", std::to_string(c.num_subsets));
      break;
  }
  return out;
}

}  // namespace ctximl
