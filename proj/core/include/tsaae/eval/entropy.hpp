#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tsaae/data/series.hpp"

namespace tsaae::eval {

// Half-open value range [lower, upper).
struct Category {
  double lower;
  double upper;

  bool contains(double x) const { return x >= lower && (x < upper || (x == upper && std::isinf(upper))); }
};

/// x >= 1, 1 > x >= 0, 0 > x >= -1, x < -1.
std::vector<Category> default_categories();

/// Throws ConfigError unless the categories tile the whole real line without gaps or overlaps.
void validate_categories(const std::vector<Category>& categories);

struct EntropyResult {
  double mean = 0.0;               // averaged over variables, in [0, 1]
  std::vector<double> per_variable;
  double max_entropy = 0.0;        // log |S|
};

/// Normalized categorical entropy per variable, pooling every valid time step
/// of every series, then averaged over variables.
EntropyResult entropy(const std::vector<data::MultivariateSeries>& series,
                      const std::vector<Category>& categories = default_categories());

/// Normalized entropy of category counts: -(1/log|S|) Σ p log p with 0 log 0 = 0.
double normalized_entropy(const std::vector<std::size_t>& counts);

}  // namespace tsaae::eval
