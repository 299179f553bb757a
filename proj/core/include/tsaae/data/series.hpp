#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tsaae/matrix.hpp"

namespace tsaae::data {

// One multivariate sequence: values is [length × variables]. mask[t] is true
// for real time steps and false for padding.
struct MultivariateSeries {
  Matrix values;
  std::optional<std::vector<bool>> mask;
  std::optional<std::string> label;

  std::size_t length() const noexcept { return values.rows(); }
  std::size_t variables() const noexcept { return values.cols(); }
  /// Number of leading real steps (length() when unmasked).
  std::size_t valid_length() const;
  bool is_valid(std::size_t t) const { return !mask || (*mask)[t]; }
};

struct NormalizationStats {
  std::vector<double> min;
  std::vector<double> max;
  double upper = 1.0;  // ul
  double lower = -1.0; // ll

  std::size_t variables() const noexcept { return min.size(); }
};

inline constexpr double kDefaultSosValue = -3.0;

struct Dataset {
  std::string name;
  std::vector<MultivariateSeries> train;
  std::vector<MultivariateSeries> validation;
  std::optional<NormalizationStats> stats;
  std::vector<std::string> class_labels;
  double sos_value = kDefaultSosValue;

  std::size_t feature_count() const;
  /// Longest series length across both splits.
  std::size_t nominal_length() const;
};

/// Throws DataError when mask length or NaN-in-unmasked invariants are violated.
void validate_series(const MultivariateSeries& series);

}  // namespace tsaae::data
