#pragma once

#include <cstdint>
#include <random>

#include "tsaae/diff/tensor.hpp"

namespace tsaae::adversarial {

// Uniform prior over [-1, 1)^k for the generator's latent codes.
class PriorSampler {
 public:
  PriorSampler(std::size_t dim, std::uint64_t seed) : dim_(dim), rng_(seed) {}
  PriorSampler(std::size_t dim, std::mt19937_64 rng) : dim_(dim), rng_(std::move(rng)) {}

  std::size_t dim() const noexcept { return dim_; }
  std::mt19937_64& rng() noexcept { return rng_; }
  const std::mt19937_64& rng() const noexcept { return rng_; }

  diff::Tensor sample();

 private:
  std::size_t dim_;
  std::mt19937_64 rng_;
};

inline diff::Tensor sample_prior(PriorSampler& sampler) { return sampler.sample(); }

}  // namespace tsaae::adversarial
