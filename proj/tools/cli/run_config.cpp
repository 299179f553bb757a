#include "run_config.hpp"

#include <algorithm>
#include <charconv>

#include "tsaae/error.hpp"

namespace tsaae::cli {
namespace {

const char* const kTopLevel[] = {"model", "scheme", "data", "dataset", "out", "seed", "deterministic", "threads"};
const char* const kSections[] = {"tae.", "cae.", "gan.", "tsne.", "disc."};

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

void write_tsne(const eval::TsneConfig& t, KeyValueText& kv) {
  kv.set("tsne.perplexity", t.perplexity);
  kv.set("tsne.iterations", static_cast<std::uint64_t>(t.iterations));
  kv.set("tsne.learning_rate", t.learning_rate);
  kv.set("tsne.exaggeration", t.exaggeration);
  kv.set("tsne.exaggeration_iterations", static_cast<std::uint64_t>(t.exaggeration_iterations));
  kv.set("tsne.adaptive_gains", t.adaptive_gains);
  kv.set("tsne.kl_every", static_cast<std::uint64_t>(t.kl_every));
  kv.set("tsne.seed", t.seed);
}

eval::TsneConfig read_tsne(const KeyValueText& kv) {
  eval::TsneConfig t;
  t.perplexity = kv.get_double("tsne.perplexity");
  t.iterations = to_u64("tsne.iterations", kv.get_string("tsne.iterations"));
  t.learning_rate = kv.get_double("tsne.learning_rate");
  t.exaggeration = kv.get_double("tsne.exaggeration");
  t.exaggeration_iterations = to_u64("tsne.exaggeration_iterations", kv.get_string("tsne.exaggeration_iterations"));
  t.adaptive_gains = kv.get_bool("tsne.adaptive_gains");
  t.kl_every = to_u64("tsne.kl_every", kv.get_string("tsne.kl_every"));
  t.seed = to_u64("tsne.seed", kv.get_string("tsne.seed"));
  t.validate();
  return t;
}

}  // namespace

KeyValueText RunConfig::to_text() const {
  KeyValueText kv;
  kv.set("model", std::string(model::model_kind_name(model)));
  kv.set("scheme", std::string(adversarial::scheme_name(scheme)));
  kv.set("data", data.string());
  kv.set("dataset", dataset);
  kv.set("out", out.string());
  kv.set("seed", seed);
  kv.set("deterministic", deterministic);
  kv.set("threads", static_cast<std::uint64_t>(threads));
  tae.write(kv, "tae.");
  cae.write(kv, "cae.");
  gan.write(kv, "gan.");
  write_tsne(tsne, kv);
  for (const auto& [k, v] : discriminator_overrides.entries()) kv.set("disc." + k, v);
  return kv;
}

RunConfig RunConfig::resolve(const std::vector<KeyValueText>& overrides) {
  KeyValueText merged;
  for (const auto& layer : overrides) {
    for (const auto& [k, v] : layer.entries()) {
      const bool known = std::any_of(std::begin(kTopLevel), std::end(kTopLevel), [&](const char* t) { return k == t; }) ||
                         std::any_of(std::begin(kSections), std::end(kSections), [&](const char* p) { return starts_with(k, p); });
      if (!known) throw ConfigError("unknown config key '" + k + "'");
      merged.set(k, v);
    }
  }

  RunConfig c;
  if (auto m = merged.find("model")) c.model = model::parse_model_kind(*m);
  if (auto s = merged.find("scheme")) c.scheme = adversarial::parse_scheme(*s);
  c.gan = adversarial::GanConfig::defaults_for(c.scheme, c.model);

  KeyValueText full = c.to_text();
  for (const auto& [k, v] : merged.entries()) {
    if (starts_with(k, "disc.")) continue;
    if (!full.contains(k)) throw ConfigError("unknown config key '" + k + "'");
    full.set(k, v);
  }
  c.data = full.get_string("data");
  c.dataset = full.get_string("dataset");
  c.out = full.get_string("out");
  c.seed = to_u64("seed", full.get_string("seed"));
  c.deterministic = full.get_bool("deterministic");
  c.threads = static_cast<std::size_t>(to_u64("threads", full.get_string("threads")));
  if (c.threads == 0) throw ConfigError("key 'threads' must be >= 1");
  if (c.deterministic) c.threads = 1;
  // The run seed drives training unless gan.seed was given explicitly.
  if (!merged.contains("gan.seed")) full.set("gan.seed", c.seed);
  c.tae = model::TransformerConfig::read(full, "tae.");
  c.cae = model::CaeConfig::read(full, "cae.");
  c.gan = adversarial::GanConfig::read(full, "gan.");
  if (c.gan.scheme != c.scheme) throw ConfigError("gan.scheme disagrees with scheme");
  c.tsne = read_tsne(full);
  for (const auto& [k, v] : merged.entries()) {
    if (starts_with(k, "disc.")) c.discriminator_overrides.set(k.substr(5), v);
  }
  return c;
}

void RunConfig::fit_to(const data::Dataset& dataset) {
  const std::size_t v = dataset.feature_count();
  const std::size_t len = dataset.nominal_length();
  tae.variables = cae.variables = v;
  tae.seq_len = len + 1;
  cae.seq_len = len;
  tae.validate();
  cae.validate();
}

std::unique_ptr<model::GenerativeModel> RunConfig::build_model() const {
  if (model == model::ModelKind::tae) return std::make_unique<model::TransformerAutoencoder>(tae);
  return std::make_unique<model::ConvAutoencoder>(cae);
}

model::TransformerConfig RunConfig::discriminator_config(const model::GenerativeModel& m) const {
  const model::TransformerConfig base = adversarial::discriminator_config_for(m);
  KeyValueText kv;
  base.write(kv, "");
  for (const auto& [k, v] : discriminator_overrides.entries()) {
    if (!kv.contains(k)) throw ConfigError("unknown config key 'disc." + k + "'");
    if (k == "variables" || k == "seq_len") throw ConfigError("disc." + k + " follows the data and cannot be set");
    kv.set(k, v);
  }
  return model::TransformerConfig::read(kv, "");
}

std::pair<std::filesystem::path, std::filesystem::path> find_ts_pair(const std::filesystem::path& dir,
                                                                     const std::string& name) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("data directory '" + dir.string() + "' does not exist");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    const std::string suffix = "_TRAIN.ts";
    if (file.size() > suffix.size() && file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0) {
      names.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  std::string pick = name;
  if (pick.empty()) {
    if (names.size() != 1) {
      throw ConfigError("data directory '" + dir.string() + "' holds " + std::to_string(names.size()) +
                        " *_TRAIN.ts files; set dataset to choose one");
    }
    pick = names.front();
  }
  const fs::path train = dir / (pick + "_TRAIN.ts");
  const fs::path test = dir / (pick + "_TEST.ts");
  if (!fs::exists(train)) throw ConfigError("missing " + train.string());
  if (!fs::exists(test)) throw ConfigError("missing " + test.string());
  return {train, test};
}

KeyValueText parse_assignments(const std::vector<std::string>& assignments) {
  KeyValueText kv;
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + a + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    kv.set(trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
  }
  return kv;
}

}  // namespace tsaae::cli
