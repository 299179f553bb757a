#pragma once

#include <functional>
#include <string>

#include "tsaae/diff/params.hpp"

namespace tsaae::diff {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

using LossBuilder = std::function<Tensor(const ParameterStore&)>;

// Compares backward() against central differences for every coordinate of
// every parameter. Relative error is |a - n| / max(1e-8, |a| + |n|).
// Gradients in `store` are cleared on return.
GradCheckResult grad_check(const LossBuilder& build_loss, ParameterStore& store, double eps = 1e-5);

}  // namespace tsaae::diff
