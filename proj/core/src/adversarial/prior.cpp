#include "tsaae/adversarial/prior.hpp"

namespace tsaae::adversarial {

diff::Tensor PriorSampler::sample() {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> z(dim_);
  for (auto& v : z) {
    do v = uniform(rng_);
    while (v >= 1.0);
  }
  return diff::Tensor::from({dim_}, std::move(z));
}

}  // namespace tsaae::adversarial
