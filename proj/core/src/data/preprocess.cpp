#include "tsaae/data/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsaae/error.hpp"

namespace tsaae::data {

std::size_t MultivariateSeries::valid_length() const {
  if (!mask) return length();
  std::size_t n = 0;
  while (n < mask->size() && (*mask)[n]) ++n;
  return n;
}

std::size_t Dataset::feature_count() const {
  if (!train.empty()) return train.front().variables();
  if (!validation.empty()) return validation.front().variables();
  return 0;
}

std::size_t Dataset::nominal_length() const {
  std::size_t n = 0;
  for (const auto& s : train) n = std::max(n, s.length());
  for (const auto& s : validation) n = std::max(n, s.length());
  return n;
}

void validate_series(const MultivariateSeries& series) {
  if (series.mask && series.mask->size() != series.length()) {
    throw DataError("mask length " + std::to_string(series.mask->size()) + " differs from series length " +
                    std::to_string(series.length()));
  }
  for (std::size_t t = 0; t < series.length(); ++t) {
    if (!series.is_valid(t)) continue;
    for (double v : series.values.row(t)) {
      if (std::isnan(v)) throw DataError("NaN at unmasked time step " + std::to_string(t));
    }
  }
}

NormalizationStats compute_stats(const std::vector<MultivariateSeries>& series, double lower, double upper) {
  if (!(upper > lower)) throw ConfigError("normalization limits need ul > ll");
  if (series.empty()) throw ContractError("compute_stats: no series");
  const std::size_t v = series.front().variables();
  NormalizationStats stats;
  stats.lower = lower;
  stats.upper = upper;
  stats.min.assign(v, std::numeric_limits<double>::infinity());
  stats.max.assign(v, -std::numeric_limits<double>::infinity());
  for (const auto& s : series) {
    if (s.variables() != v) throw ShapeError("compute_stats: series disagree on the variable count");
    for (std::size_t t = 0; t < s.length(); ++t) {
      if (!s.is_valid(t)) continue;
      for (std::size_t j = 0; j < v; ++j) {
        stats.min[j] = std::min(stats.min[j], s.values(t, j));
        stats.max[j] = std::max(stats.max[j], s.values(t, j));
      }
    }
  }
  return stats;
}

MultivariateSeries normalize_series(const MultivariateSeries& series, const NormalizationStats& stats) {
  if (series.variables() != stats.variables()) throw ShapeError("normalize: variable count differs from stats");
  MultivariateSeries out = series;
  const double span = stats.upper - stats.lower;
  for (std::size_t t = 0; t < out.length(); ++t) {
    for (std::size_t j = 0; j < out.variables(); ++j) {
      const double range = stats.max[j] - stats.min[j];
      double& x = out.values(t, j);
      if (!series.is_valid(t)) continue;
      x = range > 0.0 ? (x - stats.min[j]) / range * span + stats.lower : stats.lower;
    }
  }
  return out;
}

MultivariateSeries denormalize(const MultivariateSeries& series, const NormalizationStats& stats) {
  if (series.variables() != stats.variables()) throw ShapeError("denormalize: variable count differs from stats");
  MultivariateSeries out = series;
  const double span = stats.upper - stats.lower;
  for (std::size_t t = 0; t < out.length(); ++t) {
    for (std::size_t j = 0; j < out.variables(); ++j) {
      const double range = stats.max[j] - stats.min[j];
      double& x = out.values(t, j);
      x = range > 0.0 ? (x - stats.lower) / span * range + stats.min[j] : stats.min[j];
    }
  }
  return out;
}

std::pair<Dataset, NormalizationStats> normalize(const Dataset& dataset) {
  const auto stats = compute_stats(dataset.train);
  Dataset out = dataset;
  for (auto& s : out.train) s = normalize_series(s, stats);
  for (auto& s : out.validation) s = normalize_series(s, stats);
  out.stats = stats;
  return {std::move(out), stats};
}

MultivariateSeries prepend_sos(const MultivariateSeries& series, double sos_value) {
  MultivariateSeries out;
  out.label = series.label;
  out.values = Matrix(series.length() + 1, series.variables(), sos_value);
  std::copy(series.values.data().begin(), series.values.data().end(),
            out.values.data().begin() + static_cast<std::ptrdiff_t>(series.variables()));
  if (series.mask) {
    std::vector<bool> mask;
    mask.reserve(series.mask->size() + 1);
    mask.push_back(true);
    mask.insert(mask.end(), series.mask->begin(), series.mask->end());
    out.mask = std::move(mask);
  }
  return out;
}

std::vector<MultivariateSeries> pad_and_mask(const std::vector<MultivariateSeries>& series, std::size_t max_len) {
  std::vector<MultivariateSeries> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.length() > max_len) {
      throw ContractError("pad_and_mask: series " + std::to_string(i) + " has length " + std::to_string(s.length()) +
                          " > max_len " + std::to_string(max_len));
    }
    MultivariateSeries p;
    p.label = s.label;
    p.values = Matrix(max_len, s.variables(), 0.0);
    std::copy(s.values.data().begin(), s.values.data().end(), p.values.data().begin());
    std::vector<bool> mask(max_len, false);
    for (std::size_t t = 0; t < s.length(); ++t) mask[t] = s.is_valid(t);
    p.mask = std::move(mask);
    out.push_back(std::move(p));
  }
  return out;
}

KeyValueText stats_to_text(const NormalizationStats& stats) {
  KeyValueText kv;
  kv.set("variables", static_cast<std::uint64_t>(stats.variables()));
  kv.set("lower", stats.lower);
  kv.set("upper", stats.upper);
  kv.set("min", stats.min);
  kv.set("max", stats.max);
  return kv;
}

NormalizationStats stats_from_text(const KeyValueText& text) {
  NormalizationStats stats;
  stats.lower = text.get_double("lower");
  stats.upper = text.get_double("upper");
  stats.min = text.get_doubles("min");
  stats.max = text.get_doubles("max");
  const auto v = static_cast<std::size_t>(text.get_int("variables"));
  if (stats.min.size() != v || stats.max.size() != v) throw ConfigError("normalization stats: length mismatch");
  for (std::size_t j = 0; j < v; ++j) {
    if (stats.max[j] < stats.min[j]) throw ConfigError("normalization stats: max < min for feature " + std::to_string(j));
  }
  if (!(stats.upper > stats.lower)) throw ConfigError("normalization stats: upper must exceed lower");
  return stats;
}

}  // namespace tsaae::data
