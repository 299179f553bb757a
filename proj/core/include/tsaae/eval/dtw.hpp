#pragma once

#include <cstddef>
#include <vector>

#include "tsaae/data/series.hpp"

namespace tsaae::eval {

/// Dependent multivariate DTW: one shared warping path, local cost is the
/// squared Euclidean distance between full feature vectors, moves down / right /
/// diagonal. Only the valid (unpadded) prefix of each series takes part.
double dtw_distance(const data::MultivariateSeries& a, const data::MultivariateSeries& b);
double dtw_distance(const Matrix& a, const Matrix& b);

struct NearestMatch {
  double average = 0.0;
  std::vector<double> per_sample;  // min distance of each generated series
  std::vector<std::size_t> nearest;  // index into the reference list
};

/// For every generated series the smallest DTW to any reference series, and
/// their mean. `threads` > 1 splits the generated list across workers; results
/// are identical to the serial evaluation.
NearestMatch avg_min_dtw(const std::vector<data::MultivariateSeries>& generated,
                         const std::vector<data::MultivariateSeries>& reference, std::size_t threads = 1);

}  // namespace tsaae::eval
