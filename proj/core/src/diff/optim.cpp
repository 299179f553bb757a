#include "tsaae/diff/optim.hpp"

#include <algorithm>
#include <cmath>

#include "tsaae/error.hpp"

namespace tsaae::diff {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("optimizer learning_rate must be > 0");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw ConfigError("optimizer betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("optimizer epsilon must be > 0");
  if (rmsprop_decay < 0.0 || rmsprop_decay >= 1.0) throw ConfigError("rmsprop decay must lie in [0, 1)");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must lie in [0, 1)");
}

std::string_view optimizer_name(OptimizerKind kind) { return kind == OptimizerKind::adam ? "adam" : "rmsprop"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "rmsprop") return OptimizerKind::rmsprop;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

void optimizer_step(ParameterStore& store, const OptimizerConfig& config) {
  config.validate();
  if (!store.any_grad()) throw ContractError("optimizer_step: no parameter has a gradient; run backward() first");

  store.set_step_count(store.step_count() + 1);
  const double t = static_cast<double>(store.step_count());
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);

  for (auto& e : store.entries()) {
    if (!e.tensor.has_grad()) continue;
    auto w = e.tensor.mutable_values();
    const auto g = e.tensor.grad();
    auto& s = e.state;
    if (s.second.size() != w.size()) s.second.assign(w.size(), 0.0);

    if (config.kind == OptimizerKind::adam) {
      if (s.first.size() != w.size()) s.first.assign(w.size(), 0.0);
      for (std::size_t i = 0; i < w.size(); ++i) {
        s.first[i] = config.beta1 * s.first[i] + (1.0 - config.beta1) * g[i];
        s.second[i] = config.beta2 * s.second[i] + (1.0 - config.beta2) * g[i] * g[i];
        const double mhat = s.first[i] / bc1;
        const double vhat = s.second[i] / bc2;
        w[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
      }
    } else {
      const bool use_momentum = config.momentum > 0.0;
      if (use_momentum && s.first.size() != w.size()) s.first.assign(w.size(), 0.0);
      for (std::size_t i = 0; i < w.size(); ++i) {
        s.second[i] = config.rmsprop_decay * s.second[i] + (1.0 - config.rmsprop_decay) * g[i] * g[i];
        const double step = g[i] / (std::sqrt(s.second[i]) + config.epsilon);
        if (use_momentum) {
          s.first[i] = config.momentum * s.first[i] + step;
          w[i] -= config.learning_rate * s.first[i];
        } else {
          w[i] -= config.learning_rate * step;
        }
      }
    }
  }
  store.zero_grad();
}

void clip_weights(ParameterStore& store, double bound) {
  if (!(bound > 0.0)) throw ConfigError("clip bound must be > 0");
  for (auto& e : store.entries()) {
    for (auto& v : e.tensor.mutable_values()) v = std::clamp(v, -bound, bound);
  }
}

}  // namespace tsaae::diff
