#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "tsaae/data/series.hpp"
#include "tsaae/matrix.hpp"

namespace tsaae::eval {

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch = 250;
  // Per-coordinate step gains (delta-bar-delta). Off gives plain momentum descent.
  bool adaptive_gains = true;
  std::size_t kl_every = 50;
  std::uint64_t seed = 0;

  /// Throws ConfigError for non-positive rates or fewer than 250 iterations.
  void validate() const;
};

struct TsneResult {
  Matrix embedding;  // [n × 2]
  std::vector<std::pair<std::size_t, double>> kl_history;  // (iteration, KL(P || Q)), 1-based iterations
};

/// Exact t-SNE of the rows of `points`. Throws ContractError when n < 5 or
/// perplexity >= (n - 1) / 3.
TsneResult tsne_embed(const Matrix& points, const TsneConfig& config);

/// Row-major flattening of every series into one row each; all series must share a shape.
Matrix flatten_series(const std::vector<data::MultivariateSeries>& series);

/// Symmetrized joint affinities P (n × n) with per-point bandwidths searched
/// to match the perplexity (tolerance 1e-5, at most 50 halvings).
Matrix joint_affinities(const Matrix& points, double perplexity);

/// KL(P || Q) of an embedding under Student-t affinities.
double kl_divergence(const Matrix& p, const Matrix& embedding);

}  // namespace tsaae::eval
