#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsaae/model/layers.hpp"
#include "tsaae/model/model.hpp"

namespace tsaae::model {

struct CaeConfig {
  std::vector<std::size_t> channels{2, 4, 8, 16, 32, 64, 128, 256};
  std::vector<std::size_t> kernels{21, 18, 15, 13, 11, 8, 5, 3};
  std::size_t latent_dim = 60;
  std::size_t variables = 24;
  std::size_t seq_len = 51;  // no SOS row
  std::size_t aggregation_kernel = 1;
  double init_stddev = 0.02;

  std::size_t input_len() const { return seq_len * variables; }
  void validate() const;
  void write(KeyValueText& kv, const std::string& prefix) const;
  static CaeConfig read(const KeyValueText& kv, const std::string& prefix);
};

// Convolutional autoencoder over the variable-concatenated 1-D signal
// [x_{:,0}, x_{:,1}, ...]. Encoder: conv stack (relu) -> single-kernel
// aggregation over all channels -> linear to k -> tanh. Decoder mirrors it
// with transposed convolutions in reverse order. Parameters: "enc.*", "dec.*".
class ConvAutoencoder final : public GenerativeModel {
 public:
  explicit ConvAutoencoder(const CaeConfig& config);

  const CaeConfig& config() const noexcept { return config_; }

  Tensor encode(const data::MultivariateSeries& series) const;
  /// [seq_len × variables] series for a length-k code.
  Tensor decode(const Tensor& code) const;

  // GenerativeModel
  ModelKind kind() const override { return ModelKind::cae; }
  diff::ParameterStore& parameters() override { return store_; }
  const diff::ParameterStore& parameters() const override { return store_; }
  std::vector<std::string> generator_prefixes() const override { return {"dec."}; }
  std::size_t latent_dim() const override { return config_.latent_dim; }
  std::size_t variables() const override { return config_.variables; }
  std::size_t output_length() const override { return config_.seq_len; }
  data::MultivariateSeries prepare(const data::MultivariateSeries& normalized) const override { return normalized; }
  Reconstruction reconstruct(const data::MultivariateSeries& prepared) const override;
  Tensor encode_code(const data::MultivariateSeries& prepared) const override { return encode(prepared); }
  using GenerativeModel::generate;
  Tensor generate(const Tensor& code, bool) const override { return decode(code); }
  void initialize(std::mt19937_64& rng) override;
  KeyValueText config_text() const override;

 private:
  struct Conv {
    Tensor weight;
    Tensor bias;
    std::size_t kernel = 1;
  };

  CaeConfig config_;
  diff::ParameterStore store_;
  std::vector<Conv> encoder_convs_;
  Conv aggregation_;
  Linear compress_;
  Linear expand_;
  Conv disaggregation_;
  std::vector<Conv> decoder_convs_;
};

}  // namespace tsaae::model
