#pragma once

#include "tsaae/diff/tensor.hpp"

namespace tsaae::adversarial {

using diff::Tensor;

inline constexpr double kProbabilityClamp = 1e-7;

/// -(1/b) Σ [log d_real + log(1 - d_fake)], probabilities clamped to [1e-7, 1-1e-7].
Tensor gan_discriminator_loss(const Tensor& d_real, const Tensor& d_fake);
/// Non-saturating generator objective: -(1/b) Σ log d_fake.
Tensor gan_generator_loss(const Tensor& d_fake);

struct WganLosses {
  Tensor critic;     // -(mean d_real - mean d_fake)
  Tensor generator;  // -mean d_fake
};
WganLosses wgan_losses(const Tensor& d_real, const Tensor& d_fake);

}  // namespace tsaae::adversarial
