#include "tsaae/diff/init.hpp"

#include <cmath>

#include "tsaae/error.hpp"

namespace tsaae::diff {
namespace {

template <typename Draw>
void fill(ParameterStore& store, Draw draw) {
  for (auto& e : store.entries()) {
    auto values = e.tensor.mutable_values();
    switch (e.kind) {
      case ParamKind::bias:
        std::fill(values.begin(), values.end(), 0.0);
        break;
      case ParamKind::gain:
        std::fill(values.begin(), values.end(), 1.0);
        break;
      case ParamKind::weight:
        for (auto& v : values) v = draw(e);
        break;
    }
  }
}

}  // namespace

void init_xavier(ParameterStore& store, std::mt19937_64& rng) {
  fill(store, [&](const ParameterStore::Entry& e) {
    const double bound = std::sqrt(6.0 / static_cast<double>(e.fan_in + e.fan_out));
    return std::uniform_real_distribution<double>(-bound, bound)(rng);
  });
}

void init_normal(ParameterStore& store, double stddev, std::mt19937_64& rng) {
  if (!(stddev > 0.0)) throw ConfigError("init_normal: stddev must be positive");
  std::normal_distribution<double> normal(0.0, stddev);
  fill(store, [&](const ParameterStore::Entry&) { return normal(rng); });
}

}  // namespace tsaae::diff
