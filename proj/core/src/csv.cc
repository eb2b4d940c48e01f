#include "ctximl/csv.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "ctximl/errors.h"

namespace ctximl {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(Trim(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                          : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool ParseNumber(std::string_view text, double& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string Where(std::size_t line, const std::string& column) {
  return "row " + std::to_string(line) + ", column '" + column + "'";
}

}  // namespace

Dataset ParseCsv(std::string_view text, std::string_view label_column) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = Trim(text.substr(start, end - start));
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw ConfigError("csv: empty file");

  const std::vector<std::string_view> header = SplitFields(lines[0]);
  std::size_t label = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == label_column) label = j;
  if (label == header.size()) {
    std::size_t index = 0;
    const auto [ptr, ec] =
        std::from_chars(label_column.data(), label_column.data() + label_column.size(), index);
    if (ec != std::errc() || ptr != label_column.data() + label_column.size() ||
        index >= header.size())
      throw ConfigError("csv: label column '" + std::string(label_column) + "' not found");
    label = index;
  }
  if (lines.size() < 2) throw ConfigError("csv: no data rows");

  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  const auto p = static_cast<Eigen::Index>(header.size() - 1);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != label) names.emplace_back(header[j]);

  Matrix features(n, p);
  std::vector<std::string> raw_labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t line_no = static_cast<std::size_t>(i) + 2;
    const auto fields = SplitFields(lines[static_cast<std::size_t>(i) + 1]);
    if (fields.size() != header.size())
      throw ConfigError("csv: row " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(header.size()));
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == label) {
        raw_labels[static_cast<std::size_t>(i)] = std::string(fields[j]);
        continue;
      }
      double value = 0.0;
      if (!ParseNumber(fields[j], value))
        throw ConfigError("csv: non-numeric cell '" + std::string(fields[j]) + "' at " +
                          Where(line_no, std::string(header[j])));
      if (!std::isfinite(value))
        throw ConfigError("csv: non-finite value at " + Where(line_no, std::string(header[j])));
      features(i, col++) = value;
    }
  }

  // Numeric labels are compared by value so "1" and "1.0" agree.
  std::map<std::string, double> numeric;
  bool all_numeric = true;
  for (const auto& l : raw_labels) {
    double v = 0.0;
    if (!ParseNumber(l, v) || !std::isfinite(v)) {
      all_numeric = false;
      break;
    }
    numeric[l] = v;
  }
  Vector labels(n);
  if (all_numeric) {
    std::vector<double> distinct;
    for (const auto& [text_value, v] : numeric) distinct.push_back(v);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() > 2) throw ConfigError("csv: non-binary labels");
    const bool already_binary =
        std::all_of(distinct.begin(), distinct.end(), [](double v) { return v == 0.0 || v == 1.0; });
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = numeric[raw_labels[static_cast<std::size_t>(i)]];
      labels[i] = already_binary ? v : (distinct.size() == 2 && v == distinct[1] ? 1.0 : 0.0);
    }
  } else {
    std::vector<std::string> distinct = raw_labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() > 2) throw ConfigError("csv: non-binary labels");
    for (Eigen::Index i = 0; i < n; ++i)
      labels[i] = distinct.size() == 2 && raw_labels[static_cast<std::size_t>(i)] == distinct[1];
  }

  Dataset raw(std::move(features), std::move(labels), std::move(names));
  return Standardizer::Fit(raw.features()).Apply(raw);
}

Dataset LoadCsv(const std::filesystem::path& path, std::string_view label_column) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("csv: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return ParseCsv(buffer.str(), label_column);
}

}  // namespace ctximl
