#include "tsaae/model/transformer.hpp"

#include <cmath>

#include "tsaae/data/preprocess.hpp"
#include "tsaae/diff/init.hpp"
#include "tsaae/error.hpp"

namespace tsaae::model {

void TransformerConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("transformer config: " + what);
  };
  require(variables > 0, "variables must be positive");
  require(seq_len >= 2, "seq_len must include the SOS row and at least one step");
  require(model_dim > 0, "model_dim must be positive");
  require(heads > 0 && model_dim % heads == 0, "model_dim must be divisible by heads");
  require(encoder_layers > 0, "need at least one encoder layer");
  require(decoder_layers > 0, "need at least one decoder layer");
  require(ff_dim > 0, "ff_dim must be positive");
  require(latent_dim > 0, "latent_dim must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  require(std::isfinite(sos_value), "sos_value must be finite");
  require(eos_tolerance > 0.0, "eos_tolerance must be positive");
}

std::vector<std::string> TransformerConfig::warnings() const {
  std::vector<std::string> out;
  if (latent_dim >= seq_len * model_dim) {
    out.push_back("latent_dim " + std::to_string(latent_dim) + " does not compress slen*d = " +
                  std::to_string(seq_len * model_dim));
  }
  return out;
}

void TransformerConfig::write(KeyValueText& kv, const std::string& prefix) const {
  kv.set(prefix + "variables", static_cast<std::uint64_t>(variables));
  kv.set(prefix + "seq_len", static_cast<std::uint64_t>(seq_len));
  kv.set(prefix + "model_dim", static_cast<std::uint64_t>(model_dim));
  kv.set(prefix + "heads", static_cast<std::uint64_t>(heads));
  kv.set(prefix + "encoder_layers", static_cast<std::uint64_t>(encoder_layers));
  kv.set(prefix + "decoder_layers", static_cast<std::uint64_t>(decoder_layers));
  kv.set(prefix + "ff_dim", static_cast<std::uint64_t>(ff_dim));
  kv.set(prefix + "latent_dim", static_cast<std::uint64_t>(latent_dim));
  kv.set(prefix + "sos_value", sos_value);
  kv.set(prefix + "dropout", dropout);
  kv.set(prefix + "eos_value", eos_value ? format_double(*eos_value) : std::string("none"));
  kv.set(prefix + "eos_tolerance", eos_tolerance);
}

TransformerConfig TransformerConfig::read(const KeyValueText& kv, const std::string& prefix) {
  TransformerConfig c;
  auto count = [&](const std::string& key) { return static_cast<std::size_t>(kv.get_int(prefix + key)); };
  c.variables = count("variables");
  c.seq_len = count("seq_len");
  c.model_dim = count("model_dim");
  c.heads = count("heads");
  c.encoder_layers = count("encoder_layers");
  c.decoder_layers = count("decoder_layers");
  c.ff_dim = count("ff_dim");
  c.latent_dim = count("latent_dim");
  c.sos_value = kv.get_double(prefix + "sos_value");
  c.dropout = kv.get_double(prefix + "dropout");
  if (const auto eos = kv.find(prefix + "eos_value"); eos && *eos != "none") c.eos_value = kv.get_double(prefix + "eos_value");
  c.eos_tolerance = kv.get_double(prefix + "eos_tolerance");
  c.validate();
  return c;
}

TransformerEncoder::TransformerEncoder(ParameterStore& store, const std::string& prefix,
                                       const TransformerConfig& config)
    : config_(config) {
  embedding_ = Linear::create(store, prefix + ".embed", config.variables, config.model_dim);
  for (std::size_t i = 0; i < config.encoder_layers; ++i) {
    layers_.push_back(
        EncoderLayer::create(store, prefix + ".layer" + std::to_string(i), config.model_dim, config.ff_dim));
  }
  bottleneck_ = Linear::create(store, prefix + ".bottleneck", config.seq_len * config.model_dim, config.latent_dim);
}

Tensor TransformerEncoder::memory(const Tensor& x, const std::optional<std::vector<bool>>& valid,
                                  std::mt19937_64& rng, std::vector<Tensor>* attention) const {
  if (x.rows() != config_.seq_len) {
    throw ShapeError("encoder: expected " + std::to_string(config_.seq_len) + " rows (SOS included), got " +
                     std::to_string(x.rows()));
  }
  Tensor h = diff::add(embed(x, embedding_), positional_encoding(config_.seq_len, config_.model_dim));
  h = diff::dropout(h, config_.dropout, rng);
  const Tensor mask = valid ? padding_mask(*valid, config_.seq_len) : Tensor();
  for (const auto& layer : layers_) h = layer.forward(h, mask, config_.heads, config_.dropout, rng, attention);
  return h;
}

Tensor TransformerEncoder::compress(const Tensor& z_full) const {
  const Tensor flat = diff::reshape(z_full, {1, config_.seq_len * config_.model_dim});
  return diff::reshape(diff::tanh(bottleneck_(flat)), {config_.latent_dim});
}

TransformerAutoencoder::TransformerAutoencoder(const TransformerConfig& config) : config_(config) {
  config_.validate();
  encoder_ = TransformerEncoder(store_, "enc", config_);
  expansion_ = Linear::create(store_, "dec.expand", config_.latent_dim, config_.seq_len * config_.model_dim);
  target_embedding_ = Linear::create(store_, "dec.embed", config_.variables, config_.model_dim);
  for (std::size_t i = 0; i < config_.decoder_layers; ++i) {
    decoder_layers_.push_back(
        DecoderLayer::create(store_, "dec.layer" + std::to_string(i), config_.model_dim, config_.ff_dim));
  }
  output_ = Linear::create(store_, "dec.output", config_.model_dim, config_.variables);
}

void TransformerAutoencoder::check_input(const data::MultivariateSeries& prepared) const {
  if (prepared.variables() != config_.variables) {
    throw ShapeError("transformer autoencoder: series has " + std::to_string(prepared.variables()) +
                     " variables, config expects " + std::to_string(config_.variables));
  }
  if (prepared.length() != config_.seq_len) {
    throw ShapeError("transformer autoencoder: series has " + std::to_string(prepared.length()) +
                     " rows, config expects seq_len " + std::to_string(config_.seq_len) + " (SOS included)");
  }
}

EncodedMemory TransformerAutoencoder::encode(const data::MultivariateSeries& prepared) const {
  check_input(prepared);
  EncodedMemory m;
  m.z_full = encoder_.memory(to_tensor(prepared.values), prepared.mask, dropout_rng_);
  m.z_code = encoder_.compress(m.z_full);
  m.z_expanded = expand(m.z_code);
  return m;
}

Tensor TransformerAutoencoder::expand(const Tensor& z_code) const {
  if (z_code.size() != config_.latent_dim) {
    throw ShapeError("expand: code has " + std::to_string(z_code.size()) + " entries, latent_dim is " +
                     std::to_string(config_.latent_dim));
  }
  const Tensor flat = expansion_(diff::reshape(z_code, {1, config_.latent_dim}));
  return diff::reshape(flat, {config_.seq_len, config_.model_dim});
}

Tensor TransformerAutoencoder::decode(const Tensor& target_in, const Tensor& memory,
                                      const std::optional<std::vector<bool>>& target_valid) const {
  const std::size_t rows = target_in.rows();
  if (rows == 0 || rows > config_.seq_len) throw ShapeError("decode: target length out of range");
  Tensor h = diff::add(embed(target_in, target_embedding_), positional_encoding(rows, config_.model_dim));
  h = diff::dropout(h, config_.dropout, dropout_rng_);
  Tensor mask = causal_mask(rows);
  if (target_valid) mask = combine_masks(mask, padding_mask(*target_valid, rows));
  for (const auto& layer : decoder_layers_) {
    h = layer.forward(h, memory, mask, config_.heads, config_.dropout, dropout_rng_);
  }
  return output_(h);
}

Tensor TransformerAutoencoder::reconstruct_values(const data::MultivariateSeries& prepared) const {
  const EncodedMemory m = encode(prepared);
  const Tensor x = to_tensor(prepared.values);
  const Tensor shifted = diff::slice_rows(x, 0, config_.seq_len - 1);
  std::optional<std::vector<bool>> valid;
  if (prepared.mask) valid = std::vector<bool>(prepared.mask->begin(), prepared.mask->end() - 1);
  return decode(shifted, m.z_expanded, valid);
}

Reconstruction TransformerAutoencoder::reconstruct(const data::MultivariateSeries& prepared) const {
  Reconstruction r;
  r.prediction = reconstruct_values(prepared);
  const std::size_t rows = config_.seq_len - 1;
  r.target = to_tensor(prepared.values.slice_rows(1, rows));
  std::size_t valid_rows = rows;
  if (prepared.mask) {
    std::vector<double> w(rows * config_.variables, 0.0);
    valid_rows = 0;
    for (std::size_t t = 0; t < rows; ++t) {
      if (!(*prepared.mask)[t + 1]) continue;
      std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(t * config_.variables), config_.variables, 1.0);
      ++valid_rows;
    }
    r.weight = Tensor::matrix(rows, config_.variables, std::move(w));
  }
  r.valid_elements = valid_rows * config_.variables;
  return r;
}

Tensor TransformerAutoencoder::generate_steps(const Tensor& z_code, std::size_t max_len, bool unroll_grad) const {
  if (max_len == 0 || max_len > config_.seq_len - 1) {
    throw ContractError("generate: max_len must lie in [1, " + std::to_string(config_.seq_len - 1) + "]");
  }
  const Tensor memory = expand(z_code);
  std::vector<Tensor> rows;
  std::vector<Tensor> fed;
  fed.push_back(Tensor::full({1, config_.variables}, config_.sos_value));
  for (std::size_t step = 0; step < max_len; ++step) {
    const Tensor out = decode(diff::concat_rows(fed), memory);
    Tensor next = diff::slice_rows(out, out.rows() - 1, 1);
    for (double v : next.values()) {
      if (!std::isfinite(v)) throw NumericError("generation diverged at step " + std::to_string(step));
    }
    rows.push_back(next);
    fed.push_back(unroll_grad ? next : next.detach());
    if (config_.eos_value) {
      double dist = 0.0;
      for (double v : next.values()) dist = std::max(dist, std::abs(v - *config_.eos_value));
      if (dist <= config_.eos_tolerance) break;
    }
  }
  return diff::concat_rows(rows);
}

std::vector<Tensor> TransformerAutoencoder::encoder_attention(const data::MultivariateSeries& prepared) const {
  check_input(prepared);
  std::vector<Tensor> weights;
  encoder_.memory(to_tensor(prepared.values), prepared.mask, dropout_rng_, &weights);
  return weights;
}

data::MultivariateSeries TransformerAutoencoder::prepare(const data::MultivariateSeries& normalized) const {
  return data::prepend_sos(normalized, config_.sos_value);
}

void TransformerAutoencoder::initialize(std::mt19937_64& rng) {
  diff::init_xavier(store_, rng);
  dropout_rng_.seed(rng());
}

KeyValueText TransformerAutoencoder::config_text() const {
  KeyValueText kv;
  kv.set("model", "tae");
  config_.write(kv, "tae.");
  return kv;
}

}  // namespace tsaae::model
