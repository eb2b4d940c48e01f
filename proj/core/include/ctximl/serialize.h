#ifndef CTXIML_SERIALIZE_H_
#define CTXIML_SERIALIZE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "ctximl/data_valuation.h"
#include "ctximl/feature_effects.h"
#include "ctximl/importance.h"
#include "ctximl/shapley.h"

namespace ctximl {

// Shortest text that round-trips through strtod ("%.17g").
std::string FormatDouble(double value);

// CSV: grid_value followed by ice_<k> per inference row (ICE) or a single
// value column (PD, ALE; ALE adds bin_count for the interval ending at the
// grid point).
std::string EffectCurveCsv(const EffectCurve& curve);
std::string EffectCurveJson(const EffectCurve& curve, const std::string& feature_name);

// Long format: inference_id,feature,phi.
std::string AttributionCsv(const AttributionResult& result,
                           const std::vector<std::string>& feature_names);
std::string AttributionJson(const AttributionResult& result,
                            const std::vector<std::string>& feature_names);

// feature,score
std::string ImportanceCsv(const ImportanceReport& report,
                          const std::vector<std::string>& feature_names);
std::string ImportanceJson(const ImportanceReport& report,
                           const std::vector<std::string>& feature_names);

// row_id,value
std::string DataValueCsv(const DataValueReport& report);
std::string DataValueJson(const DataValueReport& report);

// row_id,selected,coefficient
std::string ContextSelectionCsv(const ContextSelection& selection);
std::string ContextSelectionJson(const ContextSelection& selection);

// Dataset as CSV with the label in the last column ("label").
std::string DatasetCsv(const Dataset& data);

// Writes `content` verbatim, creating parent directories. Throws
// std::runtime_error on I/O failure.
void WriteTextFile(const std::filesystem::path& path, const std::string& content);

}  // namespace ctximl

#endif  // CTXIML_SERIALIZE_H_
