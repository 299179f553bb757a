#include "tsaae/adversarial/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tsaae/adversarial/losses.hpp"
#include "tsaae/adversarial/prior.hpp"
#include "tsaae/data/preprocess.hpp"
#include "tsaae/diff/ops.hpp"
#include "tsaae/error.hpp"

namespace tsaae::adversarial {
namespace {

std::uint64_t read_u64(const KeyValueText& kv, const std::string& key) {
  const std::string text = kv.get_string(key);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw ConfigError(key + ": not an unsigned integer: " + text);
  return value;
}

KeyValueText with_prefix(const KeyValueText& kv, const std::string& prefix) {
  KeyValueText out;
  for (const auto& [k, v] : kv.entries()) out.set(prefix + k, v);
  return out;
}

KeyValueText strip_prefix(const KeyValueText& kv, const std::string& prefix) {
  KeyValueText out;
  for (const auto& [k, v] : kv.entries()) {
    if (k.rfind(prefix, 0) == 0) out.set(k.substr(prefix.size()), v);
  }
  return out;
}

void merge(KeyValueText& into, const KeyValueText& from) {
  for (const auto& [k, v] : from.entries()) into.set(k, v);
}

void require_finite(double value, const char* phase, std::size_t epoch, std::size_t batch) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string("non-finite ") + phase + " loss at epoch " + std::to_string(epoch) + ", batch " +
                       std::to_string(batch));
  }
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 shuffle_rng(seq);
  std::shuffle(order.begin(), order.end(), shuffle_rng);
  return order;
}

diff::Tensor values_of(const data::MultivariateSeries& s) { return model::to_tensor(s.values); }

constexpr std::size_t kHistoryColumns = 5;

}  // namespace

GanConfig GanConfig::defaults_for(Scheme scheme, model::ModelKind kind) {
  GanConfig c;
  c.scheme = scheme;
  c.ae_learning_rate = kind == model::ModelKind::tae ? 1e-4 : 1e-3;
  c.gan_learning_rate = c.ae_learning_rate;
  if (scheme == Scheme::wgan) {
    c.gan_learning_rate = 5e-5;
    c.critic_steps = 5;
  }
  return c;
}

void GanConfig::validate() const {
  if (batch_size < 1) throw ConfigError("gan config: batch_size must be >= 1");
  if (critic_steps < 1) throw ConfigError("gan config: critic_steps must be >= 1");
  if (scheme == Scheme::wgan && !(clip_bound > 0.0)) throw ConfigError("gan config: clip_bound must be > 0 for wgan");
  if (!(ae_learning_rate > 0.0)) throw ConfigError("gan config: ae_learning_rate must be > 0");
  if (scheme != Scheme::none && !(gan_learning_rate > 0.0)) throw ConfigError("gan config: gan_learning_rate must be > 0");
}

diff::OptimizerConfig GanConfig::autoencoder_optimizer() const { return diff::OptimizerConfig::adam(ae_learning_rate); }

diff::OptimizerConfig GanConfig::adversarial_optimizer() const {
  return scheme == Scheme::wgan ? diff::OptimizerConfig::rmsprop(gan_learning_rate)
                                : diff::OptimizerConfig::adam(gan_learning_rate);
}

void GanConfig::write(KeyValueText& kv, const std::string& prefix) const {
  kv.set(prefix + "scheme", std::string(scheme_name(scheme)));
  kv.set(prefix + "epochs", static_cast<std::uint64_t>(epochs));
  kv.set(prefix + "batch_size", static_cast<std::uint64_t>(batch_size));
  kv.set(prefix + "ae_learning_rate", ae_learning_rate);
  kv.set(prefix + "gan_learning_rate", gan_learning_rate);
  kv.set(prefix + "critic_steps", static_cast<std::uint64_t>(critic_steps));
  kv.set(prefix + "clip_bound", clip_bound);
  kv.set(prefix + "seed", seed);
  kv.set(prefix + "unroll_grad", unroll_grad);
  kv.set(prefix + "checkpoint_every", static_cast<std::uint64_t>(checkpoint_every));
}

GanConfig GanConfig::read(const KeyValueText& kv, const std::string& prefix) {
  GanConfig c;
  c.scheme = parse_scheme(kv.get_string(prefix + "scheme"));
  c.epochs = static_cast<std::size_t>(read_u64(kv, prefix + "epochs"));
  c.batch_size = static_cast<std::size_t>(read_u64(kv, prefix + "batch_size"));
  c.ae_learning_rate = kv.get_double(prefix + "ae_learning_rate");
  c.gan_learning_rate = kv.get_double(prefix + "gan_learning_rate");
  c.critic_steps = static_cast<std::size_t>(read_u64(kv, prefix + "critic_steps"));
  c.clip_bound = kv.get_double(prefix + "clip_bound");
  c.seed = read_u64(kv, prefix + "seed");
  c.unroll_grad = kv.get_bool(prefix + "unroll_grad");
  c.checkpoint_every = static_cast<std::size_t>(read_u64(kv, prefix + "checkpoint_every"));
  c.validate();
  return c;
}

TrainingSession::TrainingSession(std::unique_ptr<model::GenerativeModel> model, const GanConfig& gan,
                                 const data::NormalizationStats& stats,
                                 std::optional<model::TransformerConfig> discriminator)
    : model_(std::move(model)), gan_(gan), stats_(stats), rng_(gan.seed) {
  if (!model_) throw ContractError("training session needs a model");
  gan_.validate();
  if (stats_.variables() != model_->variables()) {
    throw ConfigError("normalization stats cover " + std::to_string(stats_.variables()) + " features, model has " +
                      std::to_string(model_->variables()));
  }
  model_->initialize(rng_);
  if (gan_.scheme != Scheme::none) {
    discriminator_ = std::make_unique<Discriminator>(discriminator.value_or(discriminator_config_for(*model_)), gan_.scheme);
    discriminator_->initialize(rng_);
  }
  build_groups();
}

void TrainingSession::build_groups() { generator_group_ = model_->parameters().subset(model_->generator_prefixes()); }

Checkpoint TrainingSession::to_checkpoint() const {
  Checkpoint cp;
  merge(cp.header, model_->config_text());
  gan_.write(cp.header, "gan.");
  if (discriminator_) discriminator_->config().write(cp.header, "disc.");
  merge(cp.header, with_prefix(data::stats_to_text(stats_), "stats."));
  cp.header.set("epoch", static_cast<std::uint64_t>(epoch_));
  std::ostringstream rng_text;
  rng_text << rng_;
  cp.header.set("rng", rng_text.str());

  cp.add_store("model", model_->parameters());
  cp.add_optimizer_state("ae", model_->parameters());
  if (discriminator_) {
    cp.add_store("disc", discriminator_->parameters());
    cp.add_optimizer_state("d", discriminator_->parameters());
    cp.add_optimizer_state("g", generator_group_);
  }
  Checkpoint::Blob history{"history", {history_.size(), kHistoryColumns}, {}};
  const double nan = std::nan("");
  for (const auto& h : history_) {
    history.values.insert(history.values.end(), {static_cast<double>(h.epoch), h.recon_loss, h.recon_mse,
                                                 h.d_loss.value_or(nan), h.g_loss.value_or(nan)});
  }
  cp.blobs.push_back(std::move(history));
  return cp;
}

TrainingSession TrainingSession::from_checkpoint(const Checkpoint& cp) {
  TrainingSession s;
  s.model_ = model::make_model(cp.header);
  s.gan_ = GanConfig::read(cp.header, "gan.");
  s.stats_ = data::stats_from_text(strip_prefix(cp.header, "stats."));
  s.epoch_ = static_cast<std::size_t>(read_u64(cp.header, "epoch"));
  std::istringstream rng_text(cp.header.get_string("rng"));
  rng_text >> s.rng_;
  if (!rng_text) throw CompatibilityError("checkpoint RNG state is malformed");

  cp.restore_store("model", s.model_->parameters());
  cp.restore_optimizer_state("ae", s.model_->parameters());
  s.build_groups();
  if (s.gan_.scheme != Scheme::none) {
    if (!cp.header.contains("disc.variables")) throw CompatibilityError("checkpoint lacks the discriminator config");
    s.discriminator_ = std::make_unique<Discriminator>(model::TransformerConfig::read(cp.header, "disc."), s.gan_.scheme);
    cp.restore_store("disc", s.discriminator_->parameters());
    cp.restore_optimizer_state("d", s.discriminator_->parameters());
    cp.restore_optimizer_state("g", s.generator_group_);
  }
  if (const auto* h = cp.find("history")) {
    if (h->shape.size() != 2 || h->shape[1] != kHistoryColumns) throw CompatibilityError("checkpoint history has a bad shape");
    for (std::size_t r = 0; r < h->shape[0]; ++r) {
      const double* row = h->values.data() + r * kHistoryColumns;
      EpochStats e;
      e.epoch = static_cast<std::size_t>(row[0]);
      e.recon_loss = row[1];
      e.recon_mse = row[2];
      if (!std::isnan(row[3])) e.d_loss = row[3];
      if (!std::isnan(row[4])) e.g_loss = row[4];
      s.history_.push_back(e);
    }
  }
  return s;
}

std::vector<data::MultivariateSeries> frame_for_model(const model::GenerativeModel& model,
                                                      const std::vector<data::MultivariateSeries>& normalized) {
  const std::size_t len = model.output_length();
  const bool uniform = std::all_of(normalized.begin(), normalized.end(),
                                   [&](const auto& s) { return s.length() == len && !s.mask; });
  std::vector<data::MultivariateSeries> framed = uniform ? normalized : data::pad_and_mask(normalized, len);
  for (const auto& s : framed) {
    if (s.variables() != model.variables()) {
      throw ShapeError("series has " + std::to_string(s.variables()) + " variables, model expects " +
                       std::to_string(model.variables()));
    }
  }
  return framed;
}

void TrainingSession::train(const data::Dataset& normalized, const TrainingCallbacks& callbacks,
                            const std::optional<std::filesystem::path>& checkpoint_path) {
  if (normalized.train.empty()) throw DataError("training split is empty");
  const auto real = frame_for_model(*model_, normalized.train);
  std::vector<data::MultivariateSeries> prepared;
  prepared.reserve(real.size());
  for (const auto& s : real) prepared.push_back(model_->prepare(s));

  while (epoch_ < gan_.epochs) {
    EpochStats stats = run_epoch(prepared, real, callbacks);
    ++epoch_;
    history_.push_back(stats);
    if (callbacks.after_epoch) callbacks.after_epoch(stats);
    if (checkpoint_path && gan_.checkpoint_every > 0 && epoch_ % gan_.checkpoint_every == 0) {
      to_checkpoint().save(*checkpoint_path);
    }
  }
}

EpochStats TrainingSession::run_epoch(const std::vector<data::MultivariateSeries>& prepared,
                                      const std::vector<data::MultivariateSeries>& real,
                                      const TrainingCallbacks& callbacks) {
  const std::size_t epoch = epoch_ + 1;
  const std::size_t n = prepared.size();
  const auto order = shuffled_order(n, gan_.seed, epoch);
  const auto ae_opt = gan_.autoencoder_optimizer();
  const auto adv_opt = gan_.adversarial_optimizer();
  auto& ae_params = model_->parameters();
  PriorSampler prior(model_->latent_dim(), rng_);

  EpochStats stats;
  stats.epoch = epoch;
  double recon_sum = 0.0, mse_sum = 0.0, d_sum = 0.0, g_sum = 0.0;
  std::size_t d_count = 0, g_count = 0;

  std::size_t batch_index = 0;
  for (std::size_t start = 0; start < n; start += gan_.batch_size, ++batch_index) {
    const std::size_t end = std::min(n, start + gan_.batch_size);
    const double inv_b = 1.0 / static_cast<double>(end - start);

    // (1) reconstruction
    double batch_recon = 0.0;
    for (std::size_t j = start; j < end; ++j) {
      const auto r = model_->reconstruct(prepared[order[j]]);
      const diff::Tensor loss = model::frobenius_loss(r);
      {
        diff::NoGradGuard no_grad;
        mse_sum += model::mse_loss(r).item();
      }
      batch_recon += loss.item();
      diff::backward(diff::scale(loss, inv_b));
    }
    require_finite(batch_recon, "reconstruction", epoch, batch_index);
    recon_sum += batch_recon;
    diff::optimizer_step(ae_params, ae_opt);
    if (callbacks.after_autoencoder) callbacks.after_autoencoder(epoch, batch_index);
    if (gan_.scheme == Scheme::none) continue;

    // (2) discriminator / critic
    auto& disc = *discriminator_;
    for (std::size_t step = 0; step < gan_.critic_steps; ++step) {
      double batch_d = 0.0;
      for (std::size_t j = start; j < end; ++j) {
        const auto& x = real[order[j]];
        diff::Tensor fake;
        {
          diff::NoGradGuard no_grad;
          fake = model_->generate(prior.sample(), false);
        }
        const diff::Tensor d_real = disc.score(values_of(x), x.mask);
        const diff::Tensor d_fake = disc.score(fake);
        const diff::Tensor loss = gan_.scheme == Scheme::wgan ? wgan_losses(d_real, d_fake).critic
                                                              : gan_discriminator_loss(d_real, d_fake);
        batch_d += loss.item() * inv_b;
        diff::backward(diff::scale(loss, inv_b));
      }
      require_finite(batch_d, "discriminator", epoch, batch_index);
      d_sum += batch_d;
      ++d_count;
      diff::optimizer_step(disc.parameters(), adv_opt);
      if (gan_.scheme == Scheme::wgan) diff::clip_weights(disc.parameters(), gan_.clip_bound);
      if (callbacks.after_critic) callbacks.after_critic(epoch, batch_index, step, disc);
    }

    // (3) generator through the decoding path
    double batch_g = 0.0;
    for (std::size_t j = start; j < end; ++j) {
      const diff::Tensor fake = model_->generate(prior.sample(), gan_.unroll_grad);
      const diff::Tensor d_fake = disc.score(fake);
      const diff::Tensor loss =
          gan_.scheme == Scheme::wgan ? wgan_losses(d_fake, d_fake).generator : gan_generator_loss(d_fake);
      batch_g += loss.item() * inv_b;
      diff::backward(diff::scale(loss, inv_b));
    }
    require_finite(batch_g, "generator", epoch, batch_index);
    g_sum += batch_g;
    ++g_count;
    diff::optimizer_step(generator_group_, adv_opt);
    disc.parameters().zero_grad();
    ae_params.zero_grad();
    if (callbacks.after_generator) callbacks.after_generator(epoch, batch_index);
  }

  rng_ = prior.rng();
  stats.recon_loss = recon_sum / static_cast<double>(n);
  stats.recon_mse = mse_sum / static_cast<double>(n);
  if (d_count > 0) stats.d_loss = d_sum / static_cast<double>(d_count);
  if (g_count > 0) stats.g_loss = g_sum / static_cast<double>(g_count);
  return stats;
}

GeneratedBatch generate_batch(const model::GenerativeModel& model, std::size_t n, std::uint64_t seed) {
  GeneratedBatch batch;
  PriorSampler prior(model.latent_dim(), seed);
  diff::NoGradGuard no_grad;
  for (std::size_t i = 0; i < n; ++i) {
    diff::Tensor y;
    try {
      y = model.generate(prior.sample(), false);
    } catch (const NumericError& e) {
      throw NumericError("sample " + std::to_string(i) + ": " + e.what());
    }
    data::MultivariateSeries s;
    s.values = model::to_matrix(y);
    batch.series.push_back(std::move(s));
  }
  return batch;
}

std::string loss_history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,recon_loss,d_loss,g_loss\n";
  for (const auto& h : history) {
    out += std::to_string(h.epoch) + "," + format_double(h.recon_loss) + "," +
           (h.d_loss ? format_double(*h.d_loss) : std::string()) + "," +
           (h.g_loss ? format_double(*h.g_loss) : std::string()) + "\n";
  }
  return out;
}

}  // namespace tsaae::adversarial
