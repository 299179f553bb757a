#pragma once

#include <string>
#include <string_view>

#include "tsaae/diff/params.hpp"

namespace tsaae::diff {

enum class OptimizerKind { adam, rmsprop };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double rmsprop_decay = 0.99;
  double momentum = 0.0;

  static OptimizerConfig adam(double lr) { return {OptimizerKind::adam, lr}; }
  static OptimizerConfig rmsprop(double lr) {
    OptimizerConfig c;
    c.kind = OptimizerKind::rmsprop;
    c.learning_rate = lr;
    return c;
  }

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

/// Applies one update to every parameter that has a gradient, then releases all
/// gradients. Throws ContractError when no parameter in the store has one.
void optimizer_step(ParameterStore& store, const OptimizerConfig& config);

/// Clamps every entry of every parameter into [-bound, bound].
void clip_weights(ParameterStore& store, double bound);

}  // namespace tsaae::diff
