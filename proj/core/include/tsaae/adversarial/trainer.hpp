#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tsaae/adversarial/checkpoint.hpp"
#include "tsaae/adversarial/discriminator.hpp"
#include "tsaae/data/series.hpp"
#include "tsaae/diff/optim.hpp"
#include "tsaae/model/model.hpp"

namespace tsaae::adversarial {

struct GanConfig {
  Scheme scheme = Scheme::none;
  std::size_t epochs = 2000;
  std::size_t batch_size = 32;
  double ae_learning_rate = 1e-4;
  double gan_learning_rate = 1e-4;
  std::size_t critic_steps = 1;
  double clip_bound = 0.1;
  std::uint64_t seed = 0;
  // Generator gradients flow through every autoregressive step when on.
  bool unroll_grad = true;
  // Periodic checkpoint interval in epochs; 0 disables.
  std::size_t checkpoint_every = 0;

  /// Learning rates and critic schedule for a scheme/model pair:
  /// AE lr 1e-4 (TAE) or 1e-3 (CAE); wgan uses RMSprop 5e-5 and 5 critic steps.
  static GanConfig defaults_for(Scheme scheme, model::ModelKind kind);

  void validate() const;
  diff::OptimizerConfig autoencoder_optimizer() const;
  /// Adam for gan, RMSprop without momentum for wgan.
  diff::OptimizerConfig adversarial_optimizer() const;

  void write(KeyValueText& kv, const std::string& prefix) const;
  static GanConfig read(const KeyValueText& kv, const std::string& prefix);
};

struct EpochStats {
  std::size_t epoch = 0;       // 1-based
  double recon_loss = 0.0;     // mean per-sample Frobenius norm of the residual
  double recon_mse = 0.0;      // mean squared error per element
  std::optional<double> d_loss;
  std::optional<double> g_loss;
};

struct TrainingCallbacks {
  std::function<void(std::size_t epoch, std::size_t batch)> after_autoencoder;
  std::function<void(std::size_t epoch, std::size_t batch, std::size_t step, const Discriminator&)> after_critic;
  std::function<void(std::size_t epoch, std::size_t batch)> after_generator;
  std::function<void(const EpochStats&)> after_epoch;
};

// Everything training mutates: model, discriminator, optimizer groups, the
// master RNG and the epoch counter. Serializes to and from a Checkpoint.
class TrainingSession {
 public:
  /// Fresh session: builds and initializes the model (and discriminator unless
  /// scheme = none) from the master seed.
  TrainingSession(std::unique_ptr<model::GenerativeModel> model, const GanConfig& gan,
                  const data::NormalizationStats& stats,
                  std::optional<model::TransformerConfig> discriminator = std::nullopt);

  static TrainingSession from_checkpoint(const Checkpoint& checkpoint);
  Checkpoint to_checkpoint() const;

  model::GenerativeModel& model() noexcept { return *model_; }
  const model::GenerativeModel& model() const noexcept { return *model_; }
  Discriminator* discriminator() noexcept { return discriminator_.get(); }
  const Discriminator* discriminator() const noexcept { return discriminator_.get(); }
  const GanConfig& gan() const noexcept { return gan_; }
  GanConfig& gan() noexcept { return gan_; }
  const data::NormalizationStats& stats() const noexcept { return stats_; }
  std::size_t epoch() const noexcept { return epoch_; }
  std::mt19937_64& rng() noexcept { return rng_; }

  /// Loss history of the epochs run so far (restored from checkpoints).
  const std::vector<EpochStats>& history() const noexcept { return history_; }

  /// Runs epochs epoch()+1 .. gan().epochs over a normalized dataset.
  /// `checkpoint_path` receives periodic checkpoints when checkpoint_every > 0.
  void train(const data::Dataset& normalized, const TrainingCallbacks& callbacks = {},
             const std::optional<std::filesystem::path>& checkpoint_path = std::nullopt);

 private:
  TrainingSession() = default;
  void build_groups();
  EpochStats run_epoch(const std::vector<data::MultivariateSeries>& prepared,
                       const std::vector<data::MultivariateSeries>& real, const TrainingCallbacks& callbacks);

  std::unique_ptr<model::GenerativeModel> model_;
  std::unique_ptr<Discriminator> discriminator_;
  GanConfig gan_;
  data::NormalizationStats stats_;
  std::size_t epoch_ = 0;
  std::mt19937_64 rng_;
  diff::ParameterStore generator_group_;
  std::vector<EpochStats> history_;
};

/// Same-framed training inputs: padded to the model length and prepared.
std::vector<data::MultivariateSeries> frame_for_model(const model::GenerativeModel& model,
                                                      const std::vector<data::MultivariateSeries>& normalized);

struct GeneratedBatch {
  std::vector<data::MultivariateSeries> series;
  bool normalized = true;
};

/// n series decoded from prior samples drawn with `seed`. A diverging sample
/// raises NumericError naming its index.
GeneratedBatch generate_batch(const model::GenerativeModel& model, std::size_t n, std::uint64_t seed);

/// Loss history as CSV: epoch,recon_loss,d_loss,g_loss (empty cells for skipped phases).
std::string loss_history_csv(const std::vector<EpochStats>& history);

}  // namespace tsaae::adversarial
