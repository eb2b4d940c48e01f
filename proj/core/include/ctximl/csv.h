#ifndef CTXIML_CSV_H_
#define CTXIML_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "ctximl/dataset.h"

namespace ctximl {

// Reads a comma-separated file with a header row. `label_column` is a
// header name or a zero-based column index. Features are z-standardized
// over the whole file; labels already in {0, 1} are kept, any other pair of
// distinct values is mapped in sorted order to 0 and 1.
//
// Throws ConfigError for an empty or missing file, ragged rows, non-numeric
// or non-finite feature cells (the message names row and column) and label
// columns with more than two distinct values.
Dataset LoadCsv(const std::filesystem::path& path, std::string_view label_column);
Dataset ParseCsv(std::string_view text, std::string_view label_column);

}  // namespace ctximl

#endif  // CTXIML_CSV_H_
