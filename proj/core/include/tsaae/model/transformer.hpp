#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tsaae/model/layers.hpp"
#include "tsaae/model/model.hpp"

namespace tsaae::model {

struct TransformerConfig {
  std::size_t variables = 24;      // v
  std::size_t seq_len = 52;        // slen, including the SOS row
  std::size_t model_dim = 24;      // d
  std::size_t heads = 8;           // m
  std::size_t encoder_layers = 6;
  std::size_t decoder_layers = 6;
  std::size_t ff_dim = 128;
  std::size_t latent_dim = 60;     // k
  double sos_value = -3.0;
  double dropout = 0.0;
  // Variable-length generation stops once a decoded row lies within
  // eos_tolerance (max-abs) of the constant EOS row.
  std::optional<double> eos_value;
  double eos_tolerance = 0.05;

  std::size_t head_dim() const { return model_dim / heads; }
  /// Throws ConfigError on invalid combinations.
  void validate() const;
  /// Non-fatal observations (e.g. a bottleneck that does not compress).
  std::vector<std::string> warnings() const;

  void write(KeyValueText& kv, const std::string& prefix) const;
  static TransformerConfig read(const KeyValueText& kv, const std::string& prefix);
};

/// Compressed latent memory: Z, tanh(W_enc flat(Z) + b_enc) and the re-expanded Z''.
struct EncodedMemory {
  diff::Tensor z_full;      // [slen × d]
  diff::Tensor z_code;      // [k]
  diff::Tensor z_expanded;  // [slen × d]
};

// Encoder stack shared by the autoencoder and the discriminator: embedding,
// positional encoding, encoder layers, row-major flatten and tanh bottleneck.
class TransformerEncoder {
 public:
  TransformerEncoder() = default;
  TransformerEncoder(ParameterStore& store, const std::string& prefix, const TransformerConfig& config);

  /// Z for a [slen × v] input; `valid` marks real (unpadded) steps.
  Tensor memory(const Tensor& x, const std::optional<std::vector<bool>>& valid, std::mt19937_64& rng,
                std::vector<Tensor>* attention = nullptr) const;
  Tensor compress(const Tensor& z_full) const;

 private:
  TransformerConfig config_;
  Linear embedding_;
  std::vector<EncoderLayer> layers_;
  Linear bottleneck_;
};

// Transformer autoencoder Ψ. Parameters are named "enc.*" (encoder ζ and the
// compressing bottleneck) and "dec.*" (expansion, decoder η and output projection).
class TransformerAutoencoder final : public GenerativeModel {
 public:
  explicit TransformerAutoencoder(const TransformerConfig& config);

  const TransformerConfig& config() const noexcept { return config_; }

  EncodedMemory encode(const data::MultivariateSeries& prepared) const;
  /// Z'' = unflatten(W_dec z + b_dec) to [slen × d].
  Tensor expand(const Tensor& z_code) const;
  /// Decoder output for a target-side input (SOS-led prefix) against memory; [rows × v].
  Tensor decode(const Tensor& target_in, const Tensor& memory,
                const std::optional<std::vector<bool>>& target_valid = std::nullopt) const;
  /// Teacher-forced prediction of rows 1..slen-1 from rows 0..slen-2.
  Tensor reconstruct_values(const data::MultivariateSeries& prepared) const;
  /// Autoregressive decode of up to max_len rows (SOS excluded). Throws
  /// NumericError naming the step when an output is not finite.
  Tensor generate_steps(const Tensor& z_code, std::size_t max_len, bool unroll_grad = true) const;

  /// Attention matrices of every encoder layer and head (for mask diagnostics).
  std::vector<Tensor> encoder_attention(const data::MultivariateSeries& prepared) const;

  // GenerativeModel
  ModelKind kind() const override { return ModelKind::tae; }
  diff::ParameterStore& parameters() override { return store_; }
  const diff::ParameterStore& parameters() const override { return store_; }
  std::vector<std::string> generator_prefixes() const override { return {"dec."}; }
  std::size_t latent_dim() const override { return config_.latent_dim; }
  std::size_t variables() const override { return config_.variables; }
  std::size_t output_length() const override { return config_.seq_len - 1; }
  data::MultivariateSeries prepare(const data::MultivariateSeries& normalized) const override;
  Reconstruction reconstruct(const data::MultivariateSeries& prepared) const override;
  Tensor encode_code(const data::MultivariateSeries& prepared) const override { return encode(prepared).z_code; }
  using GenerativeModel::generate;
  Tensor generate(const Tensor& code, bool unroll_grad) const override {
    return generate_steps(code, output_length(), unroll_grad);
  }
  void initialize(std::mt19937_64& rng) override;
  KeyValueText config_text() const override;

 private:
  void check_input(const data::MultivariateSeries& prepared) const;

  TransformerConfig config_;
  diff::ParameterStore store_;
  TransformerEncoder encoder_;
  Linear expansion_;
  Linear target_embedding_;
  std::vector<DecoderLayer> decoder_layers_;
  Linear output_;
  mutable std::mt19937_64 dropout_rng_{0};
};

}  // namespace tsaae::model
