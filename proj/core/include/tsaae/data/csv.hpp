#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsaae/data/series.hpp"

namespace tsaae::data {

// One series per file: rows are time steps, columns are variables. A first row
// that does not parse as numbers is treated as a header of feature names.
MultivariateSeries load_csv_series(const std::filesystem::path& path);
/// All `*.csv` files of a directory in lexicographic filename order.
std::vector<MultivariateSeries> load_csv_directory(const std::filesystem::path& dir);

/// Writes a header row (`names`, or dim_0..dim_{v-1} when empty) then one row per time step.
void write_csv_series(const std::filesystem::path& path, const MultivariateSeries& series,
                      const std::vector<std::string>& names = {});

std::vector<std::string> default_feature_names(std::size_t variables);

}  // namespace tsaae::data
