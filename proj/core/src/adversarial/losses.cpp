#include "tsaae/adversarial/losses.hpp"

#include "tsaae/diff/ops.hpp"
#include "tsaae/error.hpp"

namespace tsaae::adversarial {
namespace {

Tensor clamped_log(const Tensor& p) {
  return diff::log(diff::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp));
}

Tensor one_minus(const Tensor& p) { return diff::add_scalar(diff::scale(p, -1.0), 1.0); }

void require_batch(const Tensor& t, const char* what) {
  if (!t.defined() || t.size() == 0) throw ContractError(std::string(what) + ": empty batch");
}

}  // namespace

Tensor gan_discriminator_loss(const Tensor& d_real, const Tensor& d_fake) {
  require_batch(d_real, "gan_discriminator_loss");
  require_batch(d_fake, "gan_discriminator_loss");
  const Tensor real_term = diff::mean(clamped_log(d_real));
  const Tensor fake_term = diff::mean(diff::log(diff::clamp(one_minus(d_fake), kProbabilityClamp, 1.0 - kProbabilityClamp)));
  return diff::scale(diff::add(real_term, fake_term), -1.0);
}

Tensor gan_generator_loss(const Tensor& d_fake) {
  require_batch(d_fake, "gan_generator_loss");
  return diff::scale(diff::mean(clamped_log(d_fake)), -1.0);
}

WganLosses wgan_losses(const Tensor& d_real, const Tensor& d_fake) {
  require_batch(d_real, "wgan_losses");
  require_batch(d_fake, "wgan_losses");
  const Tensor fake_mean = diff::mean(d_fake);
  return {diff::scale(diff::sub(diff::mean(d_real), fake_mean), -1.0), diff::scale(fake_mean, -1.0)};
}

}  // namespace tsaae::adversarial
