#pragma once

#include <random>

#include "tsaae/diff/params.hpp"

namespace tsaae::diff {

/// Weights ~ U(±√(6/(fan_in+fan_out))); biases 0; gains 1.
void init_xavier(ParameterStore& store, std::mt19937_64& rng);

/// Weights ~ N(0, stddev²); biases 0; gains 1. stddev must be positive.
void init_normal(ParameterStore& store, double stddev, std::mt19937_64& rng);

}  // namespace tsaae::diff
