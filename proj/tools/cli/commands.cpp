#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>

#include "fetch.hpp"
#include "run_config.hpp"
#include "tsaae/adversarial/checkpoint.hpp"
#include "tsaae/adversarial/trainer.hpp"
#include "tsaae/data/csv.hpp"
#include "tsaae/data/preprocess.hpp"
#include "tsaae/data/synthetic.hpp"
#include "tsaae/data/ts_format.hpp"
#include "tsaae/error.hpp"
#include "tsaae/eval/report.hpp"
#include "tsaae/eval/tsne.hpp"

namespace tsaae::cli {
namespace fs = std::filesystem;
namespace {

fs::path data_dir_or_env(const std::string& given) {
  if (!given.empty()) return given;
  if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
  throw ConfigError(std::string("no data directory: pass --data or set ") + kDataDirEnv);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string numbered(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%03zu.csv", i);
  return buf;
}

data::Dataset normalize_with(const data::Dataset& raw, const data::NormalizationStats& stats) {
  if (raw.feature_count() != stats.variables()) {
    throw CompatibilityError("dataset has " + std::to_string(raw.feature_count()) +
                             " features, checkpoint was trained on " + std::to_string(stats.variables()));
  }
  data::Dataset out = raw;
  out.stats = stats;
  for (auto& s : out.train) s = data::normalize_series(s, stats);
  for (auto& s : out.validation) s = data::normalize_series(s, stats);
  return out;
}

data::Dataset load_dataset(const fs::path& dir, const std::string& name) {
  const auto [train, test] = find_ts_pair(dir, name);
  return data::load_ts_pair(train, test);
}

// ---- fetch-data -----------------------------------------------------------

struct FetchOptions {
  std::string source;
  std::string out;
  std::string name;
  std::string sha256;
};

bool is_ts_split(const std::string& member) { return ends_with(member, "_TRAIN.ts") || ends_with(member, "_TEST.ts"); }

std::string base_name(const std::string& member) {
  const auto slash = member.find_last_of("/\\");
  return slash == std::string::npos ? member : member.substr(slash + 1);
}

int cmd_fetch(const FetchOptions& o, std::ostream& out) {
  const fs::path out_dir = data_dir_or_env(o.out);
  std::map<std::string, std::string> files;  // file name -> bytes
  std::optional<std::string> archive_digest;

  const bool remote = o.source.rfind("http://", 0) == 0 || o.source.rfind("https://", 0) == 0;
  if (!remote && !fs::exists(o.source)) throw ConfigError("source '" + o.source + "' does not exist");
  if (!remote && fs::is_directory(o.source)) {
    const auto [train, test] = find_ts_pair(o.source, o.name);
    files[train.filename().string()] = read_bytes(train);
    files[test.filename().string()] = read_bytes(test);
  } else {
    const std::string archive = remote ? download(o.source) : read_bytes(o.source);
    archive_digest = sha256_hex(archive);
    if (archive.rfind("PK", 0) != 0) throw DataError("source '" + o.source + "' is not a zip archive");
    for (auto& m : read_zip(archive, is_ts_split)) files[base_name(m.name)] = std::move(m.bytes);
  }

  std::vector<std::string> problems;
  for (const auto& [file, bytes] : files) {
    if (ends_with(file, "_TRAIN.ts")) problems.push_back(file.substr(0, file.size() - 9));
  }
  if (!o.name.empty()) {
    problems.erase(std::remove_if(problems.begin(), problems.end(), [&](const auto& p) { return p != o.name; }),
                   problems.end());
  }
  if (problems.size() != 1) {
    throw DataError("source holds " + std::to_string(problems.size()) + " matching *_TRAIN.ts files; use --name");
  }
  const std::string problem = problems.front();
  const std::string train_file = problem + "_TRAIN.ts", test_file = problem + "_TEST.ts";
  if (!files.count(test_file)) throw DataError("source lacks " + test_file);

  const std::string content_digest = sha256_hex(files[train_file] + files[test_file]);
  if (!o.sha256.empty()) {
    std::string want = o.sha256;
    std::transform(want.begin(), want.end(), want.begin(), [](unsigned char c) { return std::tolower(c); });
    if (want != content_digest && (!archive_digest || want != *archive_digest)) {
      throw DataError("checksum mismatch: expected " + want + ", got " + (archive_digest ? *archive_digest + " (archive), " : "") +
                      content_digest + " (content)");
    }
  }

  const auto train = data::parse_ts(files[train_file], train_file);
  const auto test = data::parse_ts(files[test_file], test_file);
  if (train.dimensions != test.dimensions) throw DataError("train and test files disagree on dimensions");

  fs::create_directories(out_dir);
  write_bytes(out_dir / train_file, files[train_file]);
  write_bytes(out_dir / test_file, files[test_file]);
  write_bytes(out_dir / "checksums.sha256", sha256_hex(files[train_file]) + "  " + train_file + "\n" +
                                                sha256_hex(files[test_file]) + "  " + test_file + "\n");
  KeyValueText manifest;
  manifest.set("source", o.source);
  manifest.set("problem", problem);
  manifest.set("content_sha256", content_digest);
  if (archive_digest) manifest.set("archive_sha256", *archive_digest);
  manifest.set("train_series", static_cast<std::uint64_t>(train.series.size()));
  manifest.set("test_series", static_cast<std::uint64_t>(test.series.size()));
  manifest.set("variables", static_cast<std::uint64_t>(train.dimensions));
  manifest.write_file(out_dir / "fetch_manifest.txt");

  out << problem << ": " << train.series.size() << " train / " << test.series.size() << " test series, "
      << train.dimensions << " variables\n"
      << "content sha256 " << content_digest << "\n";
  return kExitOk;
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const std::string& out_dir, const data::SinusoidSpec& spec, std::ostream& out) {
  const auto ds = data::make_sinusoid_dataset(spec);
  fs::create_directories(out_dir);
  auto write_split = [&](const std::vector<data::MultivariateSeries>& series, const std::string& suffix) {
    data::TsFile f;
    f.problem_name = ds.name;
    f.dimensions = spec.variables;
    f.equal_length = true;
    f.series_length = spec.length;
    f.has_class_labels = true;
    f.class_labels = ds.class_labels;
    f.series = series;
    data::write_ts(fs::path(out_dir) / (ds.name + suffix), f);
  };
  write_split(ds.train, "_TRAIN.ts");
  write_split(ds.validation, "_TEST.ts");
  out << "wrote " << ds.name << "_TRAIN.ts and " << ds.name << "_TEST.ts (" << ds.train.size() << " + "
      << ds.validation.size() << " series) to " << out_dir << "\n";
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct TrainOptions {
  std::string config;
  std::vector<std::string> sets;
  std::string model, scheme, data, dataset, out, resume;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs, batch_size, checkpoint_every, threads;
  std::optional<double> lr;
  bool quiet = false;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
  std::vector<KeyValueText> layers;
  if (!o.config.empty()) {
    if (!fs::exists(o.config)) throw ConfigError("config file '" + o.config + "' does not exist");
    layers.push_back(KeyValueText::read_file(o.config));
  }
  KeyValueText flags;
  if (!o.model.empty()) flags.set("model", o.model);
  if (!o.scheme.empty()) flags.set("scheme", o.scheme);
  if (!o.data.empty()) flags.set("data", o.data);
  if (!o.dataset.empty()) flags.set("dataset", o.dataset);
  if (!o.out.empty()) flags.set("out", o.out);
  if (o.seed) flags.set("seed", *o.seed);
  if (o.epochs) flags.set("gan.epochs", static_cast<std::uint64_t>(*o.epochs));
  if (o.batch_size) flags.set("gan.batch_size", static_cast<std::uint64_t>(*o.batch_size));
  if (o.checkpoint_every) flags.set("gan.checkpoint_every", static_cast<std::uint64_t>(*o.checkpoint_every));
  if (o.threads) flags.set("threads", static_cast<std::uint64_t>(*o.threads));
  if (o.lr) flags.set("gan.ae_learning_rate", *o.lr);
  layers.push_back(flags);
  layers.push_back(parse_assignments(o.sets));

  RunConfig cfg = RunConfig::resolve(layers);
  cfg.data = data_dir_or_env(cfg.data.string());
  const auto [train_path, test_path] = find_ts_pair(cfg.data, cfg.dataset);

  const data::Dataset raw = data::load_ts_pair(train_path, test_path);
  std::optional<adversarial::TrainingSession> session;
  data::Dataset normalized;
  if (!o.resume.empty()) {
    session.emplace(adversarial::TrainingSession::from_checkpoint(adversarial::Checkpoint::load(o.resume)));
    if (session->model().kind() != cfg.model) throw CompatibilityError("checkpoint model differs from the configured model");
    normalized = normalize_with(raw, session->stats());
    session->gan().epochs = cfg.gan.epochs;
    session->gan().checkpoint_every = cfg.gan.checkpoint_every;
  } else {
    auto [norm, stats] = data::normalize(raw);
    normalized = std::move(norm);
    cfg.fit_to(normalized);
    for (const auto& w : cfg.tae.warnings()) out << "warning: " << w << "\n";
    auto model = cfg.build_model();
    std::optional<model::TransformerConfig> disc;
    if (cfg.scheme != adversarial::Scheme::none) disc = cfg.discriminator_config(*model);
    session.emplace(std::move(model), cfg.gan, stats, disc);
  }

  fs::create_directories(cfg.out);
  cfg.to_text().write_file(cfg.out / "effective_config.txt");
  data::stats_to_text(session->stats()).write_file(cfg.out / "stats.txt");
  const fs::path checkpoint = cfg.out / "checkpoint.tsae";

  out << "training " << model::model_kind_name(cfg.model) << " (" << adversarial::scheme_name(cfg.scheme) << ") on "
      << raw.name << ": " << raw.train.size() << " series, " << session->model().parameters().parameter_count()
      << " parameters, epochs " << session->epoch() + 1 << ".." << session->gan().epochs << "\n";
  const std::size_t every = std::max<std::size_t>(1, session->gan().epochs / 20);
  adversarial::TrainingCallbacks callbacks;
  callbacks.after_epoch = [&](const adversarial::EpochStats& e) {
    if (o.quiet || (e.epoch % every != 0 && e.epoch != 1)) return;
    out << "epoch " << e.epoch << " recon " << format_double(e.recon_loss) << " mse " << format_double(e.recon_mse);
    if (e.d_loss) out << " d " << format_double(*e.d_loss);
    if (e.g_loss) out << " g " << format_double(*e.g_loss);
    out << "\n" << std::flush;
  };
  try {
    session->train(normalized, callbacks, checkpoint);
  } catch (const NumericError&) {
    write_bytes(cfg.out / "loss_history.csv", adversarial::loss_history_csv(session->history()));
    throw;
  }
  session->to_checkpoint().save(checkpoint);
  write_bytes(cfg.out / "loss_history.csv", adversarial::loss_history_csv(session->history()));
  out << "checkpoint " << checkpoint.string() << "\n";
  return kExitOk;
}

// ---- generate -------------------------------------------------------------

int cmd_generate(const std::string& checkpoint, std::size_t n, std::uint64_t seed, const std::string& out_dir,
                 std::ostream& out) {
  const auto session = adversarial::TrainingSession::from_checkpoint(adversarial::Checkpoint::load(checkpoint));
  const auto batch = adversarial::generate_batch(session.model(), n, seed);
  const fs::path dir(out_dir);
  fs::create_directories(dir / "normalized");
  fs::create_directories(dir / "denormalized");
  std::string manifest = "index,normalized,denormalized,rows,variables\n";
  for (std::size_t i = 0; i < batch.series.size(); ++i) {
    const auto& s = batch.series[i];
    const std::string file = numbered(i);
    data::write_csv_series(dir / "normalized" / file, s);
    data::write_csv_series(dir / "denormalized" / file, data::denormalize(s, session.stats()));
    manifest += std::to_string(i) + ",normalized/" + file + ",denormalized/" + file + "," + std::to_string(s.length()) +
                "," + std::to_string(s.variables()) + "\n";
  }
  write_bytes(dir / "manifest.csv", manifest);
  KeyValueText info;
  info.set("checkpoint", checkpoint);
  info.set("model", std::string(model::model_kind_name(session.model().kind())));
  info.set("count", static_cast<std::uint64_t>(n));
  info.set("seed", seed);
  info.write_file(dir / "generation.txt");
  out << "generated " << n << " series into " << dir.string() << "\n";
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvalOptions {
  std::string checkpoint, data, dataset, out;
  std::size_t n = 50;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

int cmd_evaluate(const EvalOptions& o, std::ostream& out) {
  const auto session = adversarial::TrainingSession::from_checkpoint(adversarial::Checkpoint::load(o.checkpoint));
  const auto normalized = normalize_with(load_dataset(data_dir_or_env(o.data), o.dataset), session.stats());
  const auto report = eval::build_report(session.model(), normalized, o.n, o.seed, std::max<std::size_t>(1, o.threads));
  eval::write_report(report, o.out);
  out << "avg_dtw = " << format_double(report.avg_min_dtw) << "\n"
      << "entropy = " << format_double(report.entropy) << "\n"
      << "test_error = " << format_double(report.test_error) << " (mse), "
      << format_double(report.test_error_frobenius) << " (frobenius)\n"
      << "report " << (fs::path(o.out) / "report.txt").string() << "\n";
  return kExitOk;
}

// ---- embed ----------------------------------------------------------------

struct EmbedOptions {
  std::string data, dataset, checkpoint, generated, out;
  std::size_t n = 50;
  std::uint64_t seed = 0;
  eval::TsneConfig tsne;
  bool svg = true;
};

int cmd_embed(const EmbedOptions& o, std::ostream& out) {
  const auto raw = load_dataset(data_dir_or_env(o.data), o.dataset);
  std::optional<adversarial::TrainingSession> session;
  data::Dataset normalized;
  if (!o.checkpoint.empty()) {
    session.emplace(adversarial::TrainingSession::from_checkpoint(adversarial::Checkpoint::load(o.checkpoint)));
    normalized = normalize_with(raw, session->stats());
  } else {
    normalized = data::normalize(raw).first;
  }

  std::vector<data::MultivariateSeries> all = normalized.validation;
  std::vector<std::string> sources(all.size(), "real"), labels;
  for (const auto& s : all) labels.push_back(s.label.value_or(""));
  std::vector<data::MultivariateSeries> generated;
  if (!o.generated.empty()) {
    generated = data::load_csv_directory(o.generated);
  } else if (session) {
    generated = adversarial::generate_batch(session->model(), o.n, o.seed).series;
  }
  for (auto& g : generated) {
    all.push_back(std::move(g));
    sources.push_back("generated");
    labels.emplace_back();
  }

  const auto result = eval::tsne_embed(eval::flatten_series(all), o.tsne);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_bytes(dir / "embedding.csv", eval::embedding_csv(result.embedding, sources, labels));
  std::string kl = "iteration,kl\n";
  for (const auto& [it, v] : result.kl_history) kl += std::to_string(it) + "," + format_double(v) + "\n";
  write_bytes(dir / "kl_history.csv", kl);
  if (o.svg) write_bytes(dir / "embedding.svg", eval::embedding_svg(result.embedding, sources));
  out << "embedded " << all.size() << " series (" << all.size() - generated.size() << " real), final KL "
      << format_double(result.kl_history.back().second) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transformer adversarial autoencoder for multivariate time series", "tsaae"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  FetchOptions fetch;
  auto* fetch_cmd = app.add_subcommand("fetch-data", "Copy, unpack or download a *_TRAIN.ts / *_TEST.ts pair and verify it");
  fetch_cmd->add_option("source", fetch.source, "Directory, .zip archive or http(s) URL")->required();
  fetch_cmd->add_option("--out", fetch.out, std::string("Destination directory (default $") + kDataDirEnv + ")");
  fetch_cmd->add_option("--name", fetch.name, "Problem name when the source holds several");
  fetch_cmd->add_option("--sha256", fetch.sha256, "Expected SHA-256 of the archive or of train+test content");

  std::string synth_out = "data";
  data::SinusoidSpec synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write the bundled three-class sinusoid dataset as .ts files");
  synth_cmd->add_option("--out", synth_out, "Destination directory");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--series-per-class", synth.series_per_class, "Series per class and split");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train an autoencoder, optionally with a GAN or WGAN prior");
  train_cmd->add_option("--config", train.config, "key = value config file");
  train_cmd->add_option("--set", train.sets, "Override any config key (key=value), repeatable");
  train_cmd->add_option("--model", train.model, "tae or cae");
  train_cmd->add_option("--scheme", train.scheme, "none, gan or wgan");
  train_cmd->add_option("--data", train.data, "Directory with *_TRAIN.ts / *_TEST.ts");
  train_cmd->add_option("--dataset", train.dataset, "Problem name inside --data");
  train_cmd->add_option("--out", train.out, "Output directory");
  train_cmd->add_option("--seed", train.seed, "Master seed");
  train_cmd->add_option("--epochs", train.epochs, "Epoch count");
  train_cmd->add_option("--batch-size", train.batch_size, "Minibatch size");
  train_cmd->add_option("--lr", train.lr, "Autoencoder learning rate");
  train_cmd->add_option("--checkpoint-every", train.checkpoint_every, "Periodic checkpoint interval in epochs");
  train_cmd->add_option("--threads", train.threads, "Worker threads where results stay identical");
  train_cmd->add_option("--resume", train.resume, "Continue from a checkpoint");
  train_cmd->add_flag("--quiet", train.quiet, "Suppress per-epoch progress");

  std::string gen_checkpoint, gen_out;
  std::size_t gen_n = 50;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("generate", "Sample series from a trained checkpoint");
  gen_cmd->add_option("--checkpoint", gen_checkpoint, "Checkpoint file")->required();
  gen_cmd->add_option("--n", gen_n, "Number of series");
  gen_cmd->add_option("--seed", gen_seed, "Prior seed");
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();

  EvalOptions evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Average nearest DTW, entropy and test error of a checkpoint");
  eval_cmd->add_option("--checkpoint", evaluate.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--data", evaluate.data, "Directory with *_TRAIN.ts / *_TEST.ts");
  eval_cmd->add_option("--dataset", evaluate.dataset, "Problem name inside --data");
  eval_cmd->add_option("--n", evaluate.n, "Generated series to score");
  eval_cmd->add_option("--seed", evaluate.seed, "Prior seed");
  eval_cmd->add_option("--threads", evaluate.threads, "DTW worker threads (results do not depend on it)");
  eval_cmd->add_option("--out", evaluate.out, "Report directory")->required();

  EmbedOptions embed;
  auto* embed_cmd = app.add_subcommand("embed", "t-SNE of validation and generated series");
  embed_cmd->add_option("--data", embed.data, "Directory with *_TRAIN.ts / *_TEST.ts");
  embed_cmd->add_option("--dataset", embed.dataset, "Problem name inside --data");
  embed_cmd->add_option("--checkpoint", embed.checkpoint, "Generate from this checkpoint");
  embed_cmd->add_option("--generated", embed.generated, "Directory of normalized generated CSV files");
  embed_cmd->add_option("--n", embed.n, "Series to generate from the checkpoint");
  embed_cmd->add_option("--seed", embed.seed, "Prior seed");
  embed_cmd->add_option("--perplexity", embed.tsne.perplexity, "t-SNE perplexity");
  embed_cmd->add_option("--iterations", embed.tsne.iterations, "Gradient steps");
  embed_cmd->add_option("--learning-rate", embed.tsne.learning_rate, "Step size");
  embed_cmd->add_option("--tsne-seed", embed.tsne.seed, "Initial layout seed");
  embed_cmd->add_flag("!--no-svg", embed.svg, "Skip the SVG scatter plot");
  embed_cmd->add_option("--out", embed.out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (fetch_cmd->parsed()) return cmd_fetch(fetch, out);
    if (synth_cmd->parsed()) return cmd_synth(synth_out, synth, out);
    if (train_cmd->parsed()) return cmd_train(train, out);
    if (gen_cmd->parsed()) return cmd_generate(gen_checkpoint, gen_n, gen_seed, gen_out, out);
    if (eval_cmd->parsed()) return cmd_evaluate(evaluate, out);
    if (embed_cmd->parsed()) return cmd_embed(embed, out);
  } catch (const CompatibilityError& e) {
    err << "incompatible: " << e.what() << "\n";
    return kExitCompatibility;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace tsaae::cli
