#pragma once

#include <cstdint>

#include "tsaae/data/series.hpp"

namespace tsaae::data {

struct SinusoidSpec {
  std::size_t series_per_class = 20;  // per split
  std::size_t classes = 3;
  std::size_t variables = 4;
  std::size_t length = 20;
  double noise = 0.05;
  std::uint64_t seed = 7;
};

// Deterministic multi-class sinusoid problem used as the bundled fixture:
// class c oscillates at frequency (c + 1) cycles per series with per-variable
// phase offsets, random amplitude jitter and Gaussian noise. Train and
// validation splits each hold series_per_class * classes series.
Dataset make_sinusoid_dataset(const SinusoidSpec& spec = {});

}  // namespace tsaae::data
