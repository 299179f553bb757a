#pragma once

#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tsaae/data/series.hpp"
#include "tsaae/diff/params.hpp"
#include "tsaae/keyvalue.hpp"

namespace tsaae::model {

enum class ModelKind { tae, cae };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Prediction of the autoencoder and the values it should match.
struct Reconstruction {
  diff::Tensor prediction;  // recorded
  diff::Tensor target;      // constant
  diff::Tensor weight;      // same shape, 0 on padded steps; undefined when unmasked
  std::size_t valid_elements = 0;
};

// Common surface of both autoencoder families as seen by the adversarial
// trainer and the evaluation code.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual ModelKind kind() const = 0;
  virtual diff::ParameterStore& parameters() = 0;
  virtual const diff::ParameterStore& parameters() const = 0;
  /// Name prefixes of the decoding path G (sampled code -> series).
  virtual std::vector<std::string> generator_prefixes() const = 0;

  virtual std::size_t latent_dim() const = 0;
  virtual std::size_t variables() const = 0;
  /// Length of generated series (no SOS row).
  virtual std::size_t output_length() const = 0;

  /// Turns a normalized series into the model's input framing.
  virtual data::MultivariateSeries prepare(const data::MultivariateSeries& normalized) const = 0;
  virtual Reconstruction reconstruct(const data::MultivariateSeries& prepared) const = 0;
  /// Latent code in (-1, 1)^k of a prepared series.
  virtual diff::Tensor encode_code(const data::MultivariateSeries& prepared) const = 0;
  /// [output_length × variables] series decoded from a latent code. With
  /// unroll_grad off, autoregressive feedback is detached at every step.
  virtual diff::Tensor generate(const diff::Tensor& code, bool unroll_grad) const = 0;
  diff::Tensor generate(const diff::Tensor& code) const { return generate(code, true); }

  virtual void initialize(std::mt19937_64& rng) = 0;
  virtual KeyValueText config_text() const = 0;
};

/// Masked residual prediction - target.
diff::Tensor residual(const Reconstruction& r);
/// ‖residual‖_F of one sample (recorded).
diff::Tensor frobenius_loss(const Reconstruction& r);
/// Mean squared error per valid element (recorded).
diff::Tensor mse_loss(const Reconstruction& r);

/// Builds a model from its config_text(); throws ConfigError on unknown kinds.
std::unique_ptr<GenerativeModel> make_model(const KeyValueText& config);

/// Copies parameter values by name; throws CompatibilityError on missing names or shape drift.
void load_parameter_values(diff::ParameterStore& into, const diff::ParameterStore& from);

/// Series values as a constant [length × variables] tensor.
diff::Tensor to_tensor(const Matrix& m);
Matrix to_matrix(const diff::Tensor& t);

}  // namespace tsaae::model
