#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "tsaae/data/series.hpp"
#include "tsaae/keyvalue.hpp"

namespace tsaae::data {

/// Per-feature min/max over the real time steps of `series`.
NormalizationStats compute_stats(const std::vector<MultivariateSeries>& series, double lower = -1.0,
                                 double upper = 1.0);

/// x_std = (x - min) / (max - min); x_scaled = x_std (ul - ll) + ll.
/// Constant features map to ll. No clipping: values outside the fitted range extrapolate.
MultivariateSeries normalize_series(const MultivariateSeries& series, const NormalizationStats& stats);
/// Exact inverse of normalize_series; zero-range features return their min.
MultivariateSeries denormalize(const MultivariateSeries& series, const NormalizationStats& stats);

/// Fits stats on the train split and transforms both splits with them.
std::pair<Dataset, NormalizationStats> normalize(const Dataset& dataset);

/// Prepends a row filled with sos_value; the mask (if any) gains a leading true.
MultivariateSeries prepend_sos(const MultivariateSeries& series, double sos_value);

/// Pads every series with zeros to max_len and sets mask[t] = false on padding.
/// Throws ContractError when a series is longer than max_len.
std::vector<MultivariateSeries> pad_and_mask(const std::vector<MultivariateSeries>& series, std::size_t max_len);

KeyValueText stats_to_text(const NormalizationStats& stats);
NormalizationStats stats_from_text(const KeyValueText& text);

}  // namespace tsaae::data
