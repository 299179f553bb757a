#include "tsaae/data/ts_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tsaae/error.hpp"
#include "tsaae/keyvalue.hpp"

namespace tsaae::data {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool parse_bool_word(std::string_view w, const std::string& origin, std::size_t line) {
  const auto l = lower(w);
  if (l == "true") return true;
  if (l == "false") return false;
  throw ParseError(origin, line, "expected true/false, got '" + std::string(w) + "'");
}

std::size_t parse_count(std::string_view w, const std::string& origin, std::size_t line) {
  std::size_t value = 0;
  if (w.empty() || !std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw ParseError(origin, line, "expected a non-negative integer, got '" + std::string(w) + "'");
  }
  for (char c : w) value = value * 10 + static_cast<std::size_t>(c - '0');
  return value;
}

}  // namespace

TsFile parse_ts(const std::string& text, const std::string& origin) {
  TsFile file;
  bool in_data = false;
  bool missing_allowed = false;
  bool saw_dimensions = false;
  bool univariate = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (!in_data) {
      if (line.front() != '@') throw ParseError(origin, line_no, "expected a header directive before @data");
      const auto w = words(line);
      const auto directive = lower(w[0]);
      auto need_arg = [&](std::size_t n) {
        if (w.size() < n + 1) throw ParseError(origin, line_no, directive + " requires an argument");
      };
      if (directive == "@problemname") {
        need_arg(1);
        file.problem_name = std::string(trim(line.substr(w[0].size())));
      } else if (directive == "@timestamps") {
        need_arg(1);
        if (parse_bool_word(w[1], origin, line_no)) throw ParseError(origin, line_no, "timestamped series are not supported");
      } else if (directive == "@missing") {
        need_arg(1);
        missing_allowed = parse_bool_word(w[1], origin, line_no);
      } else if (directive == "@univariate") {
        need_arg(1);
        univariate = parse_bool_word(w[1], origin, line_no);
      } else if (directive == "@dimensions" || directive == "@dimension") {
        need_arg(1);
        file.dimensions = parse_count(w[1], origin, line_no);
        if (file.dimensions == 0) throw ParseError(origin, line_no, "@dimensions must be positive");
        saw_dimensions = true;
      } else if (directive == "@equallength") {
        need_arg(1);
        file.equal_length = parse_bool_word(w[1], origin, line_no);
      } else if (directive == "@serieslength") {
        need_arg(1);
        file.series_length = parse_count(w[1], origin, line_no);
      } else if (directive == "@classlabel") {
        need_arg(1);
        file.has_class_labels = parse_bool_word(w[1], origin, line_no);
        for (std::size_t i = 2; i < w.size(); ++i) file.class_labels.emplace_back(w[i]);
        if (file.has_class_labels && file.class_labels.empty()) {
          throw ParseError(origin, line_no, "@classLabel true requires a list of labels");
        }
      } else if (directive == "@targetlabel") {
        need_arg(1);
        if (parse_bool_word(w[1], origin, line_no)) throw ParseError(origin, line_no, "regression targets are not supported");
      } else if (directive == "@data") {
        in_data = true;
      } else {
        throw ParseError(origin, line_no, "unknown directive " + std::string(w[0]));
      }
      continue;
    }

    // Record: dim0 values : dim1 values : ... [: label]
    auto fields = split(line, ':');
    MultivariateSeries series;
    if (file.has_class_labels) {
      if (fields.size() < 2) throw ParseError(origin, line_no, "record is missing its class label");
      const std::string label(trim(fields.back()));
      fields.pop_back();
      if (std::find(file.class_labels.begin(), file.class_labels.end(), label) == file.class_labels.end()) {
        throw ParseError(origin, line_no, "unknown class label '" + label + "'");
      }
      series.label = label;
    }
    const std::size_t dims = saw_dimensions ? file.dimensions : (univariate ? 1 : fields.size());
    if (fields.size() != dims) {
      throw ParseError(origin, line_no,
                       "record has " + std::to_string(fields.size()) + " dimensions, expected " + std::to_string(dims));
    }
    std::vector<std::vector<double>> columns(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      for (auto tok : split(fields[d], ',')) {
        tok = trim(tok);
        if (tok.empty()) throw ParseError(origin, line_no, "empty value in dimension " + std::to_string(d));
        if (tok == "?" || lower(tok) == "nan") {
          if (!missing_allowed) throw ParseError(origin, line_no, "missing value without @missing true");
          columns[d].push_back(std::numeric_limits<double>::quiet_NaN());
          continue;
        }
        try {
          columns[d].push_back(parse_double(tok));
        } catch (const DataError&) {
          throw ParseError(origin, line_no, "malformed number '" + std::string(tok) + "'");
        }
      }
    }
    const std::size_t len = columns[0].size();
    for (std::size_t d = 1; d < dims; ++d) {
      if (columns[d].size() != len) {
        throw ParseError(origin, line_no,
                         "ragged record: dimension " + std::to_string(d) + " has " + std::to_string(columns[d].size()) +
                             " values, dimension 0 has " + std::to_string(len));
      }
    }
    // Trailing all-missing steps are padding of variable-length problems.
    std::size_t used = len;
    while (used > 0 && std::all_of(columns.begin(), columns.end(), [&](const auto& c) { return std::isnan(c[used - 1]); })) {
      --used;
    }
    if (used == 0) throw ParseError(origin, line_no, "record has no values");
    series.values = Matrix(used, dims);
    for (std::size_t t = 0; t < used; ++t) {
      for (std::size_t d = 0; d < dims; ++d) {
        if (std::isnan(columns[d][t])) throw ParseError(origin, line_no, "interior missing values are not supported");
        series.values(t, d) = columns[d][t];
      }
    }
    if (file.equal_length && file.series_length != 0 && used != file.series_length) {
      throw ParseError(origin, line_no,
                       "series length " + std::to_string(used) + " differs from @seriesLength " +
                           std::to_string(file.series_length));
    }
    if (!saw_dimensions) {
      file.dimensions = dims;
      saw_dimensions = true;
    }
    file.series.push_back(std::move(series));
  }

  if (!in_data) throw ParseError(origin, line_no, "missing @data section");
  if (file.series.empty()) throw ParseError(origin, line_no, "no records after @data");
  if (file.equal_length) {
    const auto len = file.series.front().length();
    for (const auto& s : file.series) {
      if (s.length() != len) throw ParseError(origin, line_no, "@equalLength true but series lengths differ");
    }
    if (file.series_length == 0) file.series_length = len;
  }
  return file;
}

TsFile load_ts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ts(ss.str(), path.string());
}

std::string format_ts(const TsFile& file) {
  std::ostringstream out;
  out << "@problemName " << (file.problem_name.empty() ? "unnamed" : file.problem_name) << '\n';
  out << "@timeStamps false\n";
  out << "@missing false\n";
  out << "@univariate " << (file.dimensions == 1 ? "true" : "false") << '\n';
  out << "@dimensions " << file.dimensions << '\n';
  out << "@equalLength " << (file.equal_length ? "true" : "false") << '\n';
  if (file.equal_length) {
    out << "@seriesLength " << (file.series.empty() ? file.series_length : file.series.front().length()) << '\n';
  }
  out << "@classLabel " << (file.has_class_labels ? "true" : "false");
  for (const auto& l : file.class_labels) out << ' ' << l;
  out << "\n@data\n";
  for (const auto& s : file.series) {
    for (std::size_t d = 0; d < s.variables(); ++d) {
      if (d) out << ':';
      for (std::size_t t = 0; t < s.length(); ++t) {
        if (t) out << ',';
        out << format_double(s.values(t, d));
      }
    }
    if (file.has_class_labels) out << ':' << s.label.value_or("");
    out << '\n';
  }
  return out.str();
}

void write_ts(const std::filesystem::path& path, const TsFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << format_ts(file);
  if (!out) throw DataError("write failed: " + path.string());
}

Dataset load_ts_pair(const std::filesystem::path& train_path, const std::filesystem::path& test_path) {
  TsFile train = load_ts(train_path);
  TsFile test = load_ts(test_path);
  if (train.dimensions != test.dimensions) {
    throw DataError("train and test files disagree on dimensions (" + std::to_string(train.dimensions) + " vs " +
                    std::to_string(test.dimensions) + ")");
  }
  Dataset ds;
  ds.name = train.problem_name;
  ds.class_labels = train.class_labels;
  ds.train = std::move(train.series);
  ds.validation = std::move(test.series);
  return ds;
}

}  // namespace tsaae::data
