#include "tsaae/model/conv_ae.hpp"

#include <algorithm>

#include "tsaae/diff/init.hpp"
#include "tsaae/error.hpp"

namespace tsaae::model {
namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> split_counts(const std::string& text, const std::string& key) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stoul(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': malformed integer list '" + text + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void CaeConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("cae config: " + what);
  };
  require(!channels.empty(), "channel schedule must not be empty");
  require(channels.size() == kernels.size(), "channel and kernel schedules must have equal length");
  require(std::all_of(channels.begin(), channels.end(), [](auto c) { return c > 0; }), "channels must be positive");
  require(std::all_of(kernels.begin(), kernels.end(), [](auto k) { return k > 0; }), "kernels must be positive");
  require(latent_dim > 0 && variables > 0 && seq_len > 0, "latent_dim, variables and seq_len must be positive");
  require(aggregation_kernel > 0, "aggregation kernel must be positive");
  require(init_stddev > 0.0, "init_stddev must be positive");
  const auto widest = std::max(*std::max_element(kernels.begin(), kernels.end()), aggregation_kernel);
  if (input_len() < widest) {
    throw ShapeError("cae: input length " + std::to_string(input_len()) + " is shorter than kernel size " +
                     std::to_string(widest));
  }
}

void CaeConfig::write(KeyValueText& kv, const std::string& prefix) const {
  kv.set(prefix + "channels", join(channels));
  kv.set(prefix + "kernels", join(kernels));
  kv.set(prefix + "latent_dim", static_cast<std::uint64_t>(latent_dim));
  kv.set(prefix + "variables", static_cast<std::uint64_t>(variables));
  kv.set(prefix + "seq_len", static_cast<std::uint64_t>(seq_len));
  kv.set(prefix + "aggregation_kernel", static_cast<std::uint64_t>(aggregation_kernel));
  kv.set(prefix + "init_stddev", init_stddev);
}

CaeConfig CaeConfig::read(const KeyValueText& kv, const std::string& prefix) {
  CaeConfig c;
  c.channels = split_counts(kv.get_string(prefix + "channels"), prefix + "channels");
  c.kernels = split_counts(kv.get_string(prefix + "kernels"), prefix + "kernels");
  c.latent_dim = static_cast<std::size_t>(kv.get_int(prefix + "latent_dim"));
  c.variables = static_cast<std::size_t>(kv.get_int(prefix + "variables"));
  c.seq_len = static_cast<std::size_t>(kv.get_int(prefix + "seq_len"));
  c.aggregation_kernel = static_cast<std::size_t>(kv.get_int(prefix + "aggregation_kernel"));
  c.init_stddev = kv.get_double(prefix + "init_stddev");
  c.validate();
  return c;
}

ConvAutoencoder::ConvAutoencoder(const CaeConfig& config) : config_(config) {
  config_.validate();
  const std::size_t n = config_.channels.size();
  auto conv = [&](const std::string& name, std::size_t cin, std::size_t cout, std::size_t k) {
    Conv c;
    c.kernel = k;
    c.weight = store_.add(name + ".weight", {cout, cin * k}, diff::ParamKind::weight, cin * k, cout * k);
    c.bias = store_.add(name + ".bias", {cout}, diff::ParamKind::bias);
    return c;
  };
  auto deconv = [&](const std::string& name, std::size_t cin, std::size_t cout, std::size_t k) {
    Conv c;
    c.kernel = k;
    // PyTorch's ConvTranspose1d fan convention: fan_in = out_channels·k, fan_out = in_channels·k.
    c.weight = store_.add(name + ".weight", {cin, cout * k}, diff::ParamKind::weight, cout * k, cin * k);
    c.bias = store_.add(name + ".bias", {cout}, diff::ParamKind::bias);
    return c;
  };

  std::size_t in = 1;
  for (std::size_t i = 0; i < n; ++i) {
    encoder_convs_.push_back(conv("enc.conv" + std::to_string(i), in, config_.channels[i], config_.kernels[i]));
    in = config_.channels[i];
  }
  aggregation_ = conv("enc.aggregate", in, 1, config_.aggregation_kernel);
  compress_ = Linear::create(store_, "enc.bottleneck", config_.input_len(), config_.latent_dim);

  expand_ = Linear::create(store_, "dec.expand", config_.latent_dim, config_.input_len());
  disaggregation_ = deconv("dec.aggregate", 1, in, config_.aggregation_kernel);
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t out = i == 0 ? 1 : config_.channels[i - 1];
    decoder_convs_.push_back(deconv("dec.conv" + std::to_string(i), config_.channels[i], out, config_.kernels[i]));
  }
}

Tensor ConvAutoencoder::encode(const data::MultivariateSeries& series) const {
  if (series.variables() != config_.variables || series.length() != config_.seq_len) {
    throw ShapeError("cae: expected a " + std::to_string(config_.seq_len) + "x" + std::to_string(config_.variables) +
                     " series, got " + std::to_string(series.length()) + "x" + std::to_string(series.variables()));
  }
  // Concatenate variables: [x_{:,0} | x_{:,1} | ...].
  const std::size_t len = config_.seq_len;
  std::vector<double> concat(config_.input_len());
  for (std::size_t j = 0; j < config_.variables; ++j)
    for (std::size_t t = 0; t < len; ++t) concat[j * len + t] = series.values(t, j);
  Tensor h = Tensor::matrix(1, config_.input_len(), std::move(concat));

  for (const auto& c : encoder_convs_) h = diff::relu(diff::conv1d(h, c.weight, c.bias, c.kernel));
  h = diff::conv1d(h, aggregation_.weight, aggregation_.bias, aggregation_.kernel);
  return diff::reshape(diff::tanh(compress_(h)), {config_.latent_dim});
}

Tensor ConvAutoencoder::decode(const Tensor& code) const {
  if (code.size() != config_.latent_dim) {
    throw ShapeError("cae decode: code has " + std::to_string(code.size()) + " entries, latent_dim is " +
                     std::to_string(config_.latent_dim));
  }
  Tensor h = expand_(diff::reshape(code, {1, config_.latent_dim}));
  h = diff::relu(diff::conv_transpose1d(h, disaggregation_.weight, disaggregation_.bias, disaggregation_.kernel));
  for (std::size_t i = 0; i < decoder_convs_.size(); ++i) {
    const auto& c = decoder_convs_[i];
    h = diff::conv_transpose1d(h, c.weight, c.bias, c.kernel);
    if (i + 1 < decoder_convs_.size()) h = diff::relu(h);
  }
  // De-concatenate [1 × v·slen] back to [slen × v].
  return diff::transpose(diff::reshape(h, {config_.variables, config_.seq_len}));
}

Reconstruction ConvAutoencoder::reconstruct(const data::MultivariateSeries& prepared) const {
  Reconstruction r;
  r.prediction = decode(encode(prepared));
  r.target = to_tensor(prepared.values);
  r.valid_elements = prepared.values.size();
  if (prepared.mask) {
    const std::size_t v = prepared.variables();
    std::vector<double> w(prepared.values.size(), 0.0);
    r.valid_elements = 0;
    for (std::size_t t = 0; t < prepared.length(); ++t) {
      if (!(*prepared.mask)[t]) continue;
      std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(t * v), v, 1.0);
      r.valid_elements += v;
    }
    r.weight = Tensor::matrix(prepared.length(), v, std::move(w));
  }
  return r;
}

void ConvAutoencoder::initialize(std::mt19937_64& rng) { diff::init_normal(store_, config_.init_stddev, rng); }

KeyValueText ConvAutoencoder::config_text() const {
  KeyValueText kv;
  kv.set("model", "cae");
  config_.write(kv, "cae.");
  return kv;
}

}  // namespace tsaae::model
