#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "tsaae/data/series.hpp"
#include "tsaae/diff/ops.hpp"
#include "tsaae/model/transformer.hpp"

namespace tsaae::adversarial {

enum class Scheme { none, gan, wgan };

std::string_view scheme_name(Scheme scheme);
Scheme parse_scheme(std::string_view name);

// Discriminator D: a Transformer encoder with the autoencoder's encoder
// hyperparameters, compressed to k, then a single-neuron projection. Output is
// sigmoid for the standard GAN and linear for the Wasserstein critic.
// Parameters are named "disc.*".
/// Discriminator hyperparameters for a model: the TAE's own encoder settings,
/// or the default Transformer shape fitted to a CAE's series and code size.
model::TransformerConfig discriminator_config_for(const model::GenerativeModel& model);

class Discriminator {
 public:
  Discriminator(const model::TransformerConfig& config, Scheme scheme);

  const model::TransformerConfig& config() const noexcept { return config_; }
  diff::Activation output_activation() const noexcept { return activation_; }
  diff::ParameterStore& parameters() noexcept { return store_; }
  const diff::ParameterStore& parameters() const noexcept { return store_; }

  /// Scalar score for an SOS-led [seq_len × v] series.
  diff::Tensor discriminate(const data::MultivariateSeries& prepared) const;
  diff::Tensor discriminate(const diff::Tensor& framed, const std::optional<std::vector<bool>>& valid = std::nullopt) const;
  /// Prepends the SOS row to an unframed series and scores it. Series shorter
  /// than seq_len-1 rows (early EOS) are zero-padded and masked.
  diff::Tensor score(const diff::Tensor& series, const std::optional<std::vector<bool>>& valid = std::nullopt) const;

  void initialize(std::mt19937_64& rng);

  /// Number of forward evaluations so far.
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  model::TransformerConfig config_;
  diff::Activation activation_;
  diff::ParameterStore store_;
  model::TransformerEncoder encoder_;
  model::Linear head_;
  mutable std::size_t evaluations_ = 0;
  mutable std::mt19937_64 dropout_rng_{0};
};

}  // namespace tsaae::adversarial
