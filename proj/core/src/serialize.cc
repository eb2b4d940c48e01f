#include "ctximl/serialize.h"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ctximl {
namespace {

using nlohmann::ordered_json;

ordered_json LedgerJson(const LedgerSnapshot& cost) {
  return {{"token_connections", cost.token_connections},
          {"evaluation_calls", cost.evaluation_calls}};
}

ordered_json VectorJson(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

const std::string& NameOr(const std::vector<std::string>& names, std::size_t j,
                          std::string& scratch) {
  if (j < names.size()) return names[j];
  scratch = "x" + std::to_string(j);
  return scratch;
}

std::string Dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string FormatDouble(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string EffectCurveCsv(const EffectCurve& curve) {
  std::string out = "grid_value";
  const bool ice = curve.kind == EffectKind::kIce;
  const bool ale = curve.kind == EffectKind::kAle;
  if (ice) {
    for (Eigen::Index k = 0; k < curve.values.cols(); ++k) out += ",ice_" + std::to_string(k);
  } else {
    out += ",value";
    if (ale) out += ",bin_count";
  }
  out += '\n';
  for (std::size_t g = 0; g < curve.grid.points.size(); ++g) {
    out += FormatDouble(curve.grid.points[g]);
    for (Eigen::Index k = 0; k < curve.values.cols(); ++k)
      out += "," + FormatDouble(curve.values(static_cast<Eigen::Index>(g), k));
    if (ale) out += "," + std::to_string(g == 0 ? 0 : curve.ale.bin_counts[g - 1]);
    out += '\n';
  }
  return out;
}

std::string EffectCurveJson(const EffectCurve& curve, const std::string& feature_name) {
  ordered_json j;
  j["kind"] = EffectKindName(curve.kind);
  j["feature"] = feature_name;
  j["feature_index"] = curve.grid.feature_index;
  j["grid_strategy"] = GridStrategyName(curve.grid.strategy);
  j["grid"] = curve.grid.points;
  ordered_json values = ordered_json::array();
  for (Eigen::Index g = 0; g < curve.values.rows(); ++g) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index k = 0; k < curve.values.cols(); ++k) row.push_back(curve.values(g, k));
    values.push_back(std::move(row));
  }
  j["values"] = std::move(values);
  if (curve.kind == EffectKind::kAle) {
    j["bin_counts"] = curve.ale.bin_counts;
    j["empty_bins"] = curve.ale.empty_bins;
    j["rows_outside_grid"] = curve.ale.rows_outside_grid;
  }
  return Dump(j);
}

std::string AttributionCsv(const AttributionResult& result,
                           const std::vector<std::string>& feature_names) {
  std::string out = "inference_id,feature,phi\n";
  std::string scratch;
  for (Eigen::Index k = 0; k < result.phi.cols(); ++k)
    for (Eigen::Index j = 0; j < result.phi.rows(); ++j)
      out += std::to_string(k) + "," + NameOr(feature_names, std::size_t(j), scratch) + "," +
             FormatDouble(result.phi(j, k)) + "\n";
  return out;
}

std::string AttributionJson(const AttributionResult& result,
                            const std::vector<std::string>& feature_names) {
  ordered_json j;
  std::vector<std::string> names;
  std::string scratch;
  for (Eigen::Index f = 0; f < result.phi.rows(); ++f)
    names.push_back(NameOr(feature_names, std::size_t(f), scratch));
  j["features"] = names;
  j["mode"] = result.mode.is_exact() ? "exact_retrain" : "approx_retrain";
  j["M"] = result.diagnostics.num_coalitions;
  if (!result.mode.is_exact()) j["L"] = result.mode.imputation_samples();
  j["exhaustive"] = result.diagnostics.exhaustive;
  j["condition_number"] = result.diagnostics.condition_number;
  j["ridge_fallback"] = result.diagnostics.ridge_fallback;
  j["ledger"] = LedgerJson(result.diagnostics.cost);
  j["base_value"] = VectorJson(result.base_value);
  ordered_json phi = ordered_json::array();  // one row per inference row
  for (Eigen::Index k = 0; k < result.phi.cols(); ++k) phi.push_back(VectorJson(result.phi.col(k)));
  j["phi"] = std::move(phi);
  return Dump(j);
}

std::string ImportanceCsv(const ImportanceReport& report,
                          const std::vector<std::string>& feature_names) {
  std::string out = "feature,score\n";
  std::string scratch;
  for (Eigen::Index j = 0; j < report.scores.size(); ++j)
    out += NameOr(feature_names, std::size_t(j), scratch) + "," + FormatDouble(report.scores[j]) +
           "\n";
  return out;
}

std::string ImportanceJson(const ImportanceReport& report,
                           const std::vector<std::string>& feature_names) {
  ordered_json j;
  std::vector<std::string> names;
  std::string scratch;
  for (Eigen::Index f = 0; f < report.scores.size(); ++f)
    names.push_back(NameOr(feature_names, std::size_t(f), scratch));
  j["method"] = ImportanceMethodName(report.method);
  j["risk"] = RiskName(report.risk_kind);
  j["features"] = names;
  j["scores"] = VectorJson(report.scores);
  j["baseline_risk"] = report.baseline_risk;
  if (report.method == ImportanceMethod::kSage) {
    j["empty_risk"] = report.empty_risk;
    j["M"] = report.num_coalitions;
    j["seed"] = report.seed;
    j["condition_number"] = report.condition_number;
  }
  j["ledger"] = LedgerJson(report.cost);
  return Dump(j);
}

std::string DataValueCsv(const DataValueReport& report) {
  std::string out = "row_id,value\n";
  for (Eigen::Index i = 0; i < report.values.size(); ++i)
    out += std::to_string(i) + "," + FormatDouble(report.values[i]) + "\n";
  return out;
}

std::string DataValueJson(const DataValueReport& report) {
  ordered_json j;
  j["method"] = DataValueMethodName(report.method);
  j["risk"] = RiskName(report.risk_kind);
  j["baseline_risk"] = report.baseline_risk;
  j["values"] = VectorJson(report.values);
  j["ledger"] = LedgerJson(report.cost);
  return Dump(j);
}

std::string ContextSelectionCsv(const ContextSelection& selection) {
  std::string out = "row_id,selected,coefficient\n";
  for (Eigen::Index i = 0; i < selection.coefficients.size(); ++i)
    out += std::to_string(i) + "," + (selection.selected[std::size_t(i)] ? "1" : "0") + "," +
           FormatDouble(selection.coefficients[i]) + "\n";
  return out;
}

std::string ContextSelectionJson(const ContextSelection& selection) {
  ordered_json j;
  j["indices"] = selection.selected.Indices();
  j["coefficients"] = VectorJson(selection.coefficients);
  j["intercept"] = selection.intercept;
  const ContextConfig& c = selection.config;
  j["config"] = {{"M", c.num_subsets},
                 {"n_sub", c.context_size},
                 {"size_min", c.min_subset_size},
                 {"n_val", selection.validation_rows},
                 {"seed", c.seed},
                 {"risk", RiskName(c.risk)},
                 {"weighting", c.weighting == ObservationWeighting::kKernel ? "kernel" : "uniform"}};
  j["condition_number"] = selection.condition_number;
  j["ridge_fallback"] = selection.ridge_fallback;
  j["ledger"] = LedgerJson(selection.cost);
  return Dump(j);
}

std::string DatasetCsv(const Dataset& data) {
  std::string out;
  for (const auto& name : data.column_names()) out += name + ",";
  out += "label\n";
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) out += FormatDouble(data.features()(i, j)) + ",";
    out += data.labels()[i] > 0.5 ? "1\n" : "0\n";
  }
  return out;
}

void WriteTextFile(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << content;
  if (!file) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace ctximl
