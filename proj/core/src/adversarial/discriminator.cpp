#include "tsaae/adversarial/discriminator.hpp"

#include "tsaae/diff/init.hpp"
#include "tsaae/error.hpp"

namespace tsaae::adversarial {

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::none: return "none";
    case Scheme::gan: return "gan";
    case Scheme::wgan: return "wgan";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "none") return Scheme::none;
  if (name == "gan") return Scheme::gan;
  if (name == "wgan") return Scheme::wgan;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected none, gan or wgan)");
}

Discriminator::Discriminator(const model::TransformerConfig& config, Scheme scheme)
    : config_(config), activation_(scheme == Scheme::wgan ? diff::Activation::linear : diff::Activation::sigmoid) {
  config_.validate();
  encoder_ = model::TransformerEncoder(store_, "disc", config_);
  head_ = model::Linear::create(store_, "disc.head", config_.latent_dim, 1);
}

diff::Tensor Discriminator::discriminate(const data::MultivariateSeries& prepared) const {
  return discriminate(model::to_tensor(prepared.values), prepared.mask);
}

diff::Tensor Discriminator::discriminate(const diff::Tensor& framed, const std::optional<std::vector<bool>>& valid) const {
  ++evaluations_;
  const diff::Tensor z = encoder_.compress(encoder_.memory(framed, valid, dropout_rng_));
  const diff::Tensor logit = head_(diff::reshape(z, {1, config_.latent_dim}));
  return diff::reshape(diff::activate(logit, activation_), {});
}

diff::Tensor Discriminator::score(const diff::Tensor& series, const std::optional<std::vector<bool>>& valid) const {
  const std::size_t rows = config_.seq_len - 1;
  if (series.rows() > rows) {
    throw ShapeError("discriminator: series has " + std::to_string(series.rows()) + " rows, at most " +
                     std::to_string(rows) + " allowed");
  }
  if (valid && valid->size() != series.rows()) throw ShapeError("discriminator: mask length differs from series");
  std::vector<diff::Tensor> parts{diff::Tensor::full({1, config_.variables}, config_.sos_value), series};
  std::optional<std::vector<bool>> framed_valid;
  if (valid || series.rows() < rows) {
    framed_valid = std::vector<bool>(config_.seq_len, false);
    (*framed_valid)[0] = true;
    for (std::size_t t = 0; t < series.rows(); ++t) (*framed_valid)[t + 1] = !valid || (*valid)[t];
  }
  if (series.rows() < rows) parts.push_back(diff::Tensor::zeros({rows - series.rows(), config_.variables}));
  return discriminate(diff::concat_rows(parts), framed_valid);
}

model::TransformerConfig discriminator_config_for(const model::GenerativeModel& model) {
  if (const auto* tae = dynamic_cast<const model::TransformerAutoencoder*>(&model)) return tae->config();
  model::TransformerConfig c;
  c.variables = model.variables();
  c.seq_len = model.output_length() + 1;
  c.latent_dim = model.latent_dim();
  return c;
}

void Discriminator::initialize(std::mt19937_64& rng) {
  diff::init_xavier(store_, rng);
  dropout_rng_.seed(rng());
}

}  // namespace tsaae::adversarial
