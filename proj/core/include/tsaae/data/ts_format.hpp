#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsaae/data/series.hpp"

namespace tsaae::data {

// Contents of one `.ts` sequence file (one split of a UEA/UCR problem).
struct TsFile {
  std::string problem_name;
  std::size_t dimensions = 0;
  bool equal_length = true;
  std::size_t series_length = 0;  // 0 when not declared
  bool has_class_labels = false;
  std::vector<std::string> class_labels;
  std::vector<MultivariateSeries> series;
};

/// Parses a `.ts` file. Any malformed directive, ragged record or unknown class
/// label throws ParseError with the offending line; no partial result escapes.
TsFile parse_ts(const std::string& text, const std::string& origin = "<ts>");
TsFile load_ts(const std::filesystem::path& path);

/// Canonical writer: fixed directive order, shortest round-trip numbers.
std::string format_ts(const TsFile& file);
void write_ts(const std::filesystem::path& path, const TsFile& file);

/// Loads `<dir>/<Name>_TRAIN.ts` and `<dir>/<Name>_TEST.ts` as train and validation splits.
Dataset load_ts_pair(const std::filesystem::path& train_path, const std::filesystem::path& test_path);

}  // namespace tsaae::data
