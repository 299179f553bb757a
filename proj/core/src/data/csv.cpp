#include "tsaae/data/csv.hpp"

#include <algorithm>
#include <fstream>

#include "tsaae/error.hpp"
#include "tsaae/keyvalue.hpp"

namespace tsaae::data {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

bool all_numeric(const std::vector<std::string>& cells) {
  try {
    for (const auto& c : cells) parse_double(c);
    return true;
  } catch (const DataError&) {
    return false;
  }
}

}  // namespace

std::vector<std::string> default_feature_names(std::size_t variables) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < variables; ++j) names.push_back("dim_" + std::to_string(j));
  return names;
}

MultivariateSeries load_csv_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (rows == 0 && values.empty() && !all_numeric(cells)) continue;  // header
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols) {
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(cols) + " columns, got " + std::to_string(cells.size()));
    }
    for (const auto& c : cells) {
      try {
        values.push_back(parse_double(c));
      } catch (const DataError&) {
        throw ParseError(path.string(), line_no, "malformed number '" + c + "'");
      }
    }
    ++rows;
  }
  if (rows == 0) throw DataError(path.string() + ": no data rows");
  MultivariateSeries s;
  s.values = Matrix(rows, cols, std::move(values));
  validate_series(s);
  return s;
}

std::vector<MultivariateSeries> load_csv_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<MultivariateSeries> out;
  for (const auto& f : files) out.push_back(load_csv_series(f));
  if (out.empty()) throw DataError("no .csv files in " + dir.string());
  return out;
}

void write_csv_series(const std::filesystem::path& path, const MultivariateSeries& series,
                      const std::vector<std::string>& names) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const auto header = names.empty() ? default_feature_names(series.variables()) : names;
  if (header.size() != series.variables()) throw ShapeError("write_csv_series: header width differs from series");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t t = 0; t < series.length(); ++t) {
    for (std::size_t j = 0; j < series.variables(); ++j) out << (j ? "," : "") << format_double(series.values(t, j));
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace tsaae::data
