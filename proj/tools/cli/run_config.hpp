#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsaae/adversarial/trainer.hpp"
#include "tsaae/data/series.hpp"
#include "tsaae/eval/tsne.hpp"
#include "tsaae/keyvalue.hpp"
#include "tsaae/model/conv_ae.hpp"
#include "tsaae/model/transformer.hpp"

namespace tsaae::cli {

inline constexpr const char* kDataDirEnv = "TSAAE_DATA_DIR";

// Everything a training run needs. Text form is flat `key = value`; keys:
//   model, scheme, data, dataset, out, seed, deterministic, threads,
//   tae.*, cae.*, gan.*, tsne.*, disc.* (discriminator overrides).
struct RunConfig {
  model::ModelKind model = model::ModelKind::tae;
  adversarial::Scheme scheme = adversarial::Scheme::none;
  std::filesystem::path data;
  std::string dataset;  // problem name; empty picks the only pair in `data`
  std::filesystem::path out = "run";
  std::uint64_t seed = 0;
  bool deterministic = true;
  std::size_t threads = 1;
  model::TransformerConfig tae;
  model::CaeConfig cae;
  adversarial::GanConfig gan;
  eval::TsneConfig tsne;
  KeyValueText discriminator_overrides;  // keys without the "disc." prefix

  KeyValueText to_text() const;

  /// Layers `overrides` (in order) over the defaults for the model/scheme they
  /// select. Unknown keys and malformed values raise ConfigError.
  static RunConfig resolve(const std::vector<KeyValueText>& overrides);

  /// Fits the model shapes to a dataset: variables and sequence lengths.
  void fit_to(const data::Dataset& dataset);
  std::unique_ptr<model::GenerativeModel> build_model() const;
  model::TransformerConfig discriminator_config(const model::GenerativeModel& model) const;
};

/// Finds `<name>_TRAIN.ts` / `<name>_TEST.ts` in `dir`. An empty name requires exactly one pair.
std::pair<std::filesystem::path, std::filesystem::path> find_ts_pair(const std::filesystem::path& dir,
                                                                     const std::string& name = {});

/// `key=value` pairs from repeated --set flags.
KeyValueText parse_assignments(const std::vector<std::string>& assignments);

}  // namespace tsaae::cli
