#pragma once

#include <string>
#include <vector>

#include "vcde/dataset.hpp"

namespace vcde {

struct IngestResult {
  Dataset data;
  long rows_dropped = 0;  // rows with missing/non-numeric cells in used columns
  std::vector<std::string> x_names;
  std::string y_name;
};

// Reads a headered CSV, selects the response and covariate columns (by name
// or zero-based index string), drops unusable rows with a count, and
// standardizes. Throws std::runtime_error for unreadable files and
// std::invalid_argument for missing columns or empty usable data.
IngestResult ingest_csv(const std::string& path, const std::string& y_col,
                        const std::vector<std::string>& x_cols);

}  // namespace vcde
