#include "tsaae/eval/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tsaae/error.hpp"

namespace tsaae::eval {
namespace {

constexpr double kFloor = 1e-12;
constexpr double kPerplexityTolerance = 1e-5;
constexpr std::size_t kSearchSteps = 50;

std::vector<double> squared_distances(const Matrix& x) {
  const std::size_t n = x.rows(), dim = x.cols();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = x(i, c) - x(j, c);
        s += diff * diff;
      }
      d[i * n + j] = d[j * n + i] = s;
    }
  }
  return d;
}

// Student-t numerators 1 / (1 + |y_i - y_j|^2) and their sum.
double student_t(const Matrix& y, std::vector<double>& num) {
  const std::size_t n = y.rows();
  num.assign(n * n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
      const double q = 1.0 / (1.0 + dx * dx + dy * dy);
      num[i * n + j] = num[j * n + i] = q;
      total += 2.0 * q;
    }
  }
  return total;
}

}  // namespace

void TsneConfig::validate() const {
  if (!(perplexity > 0.0)) throw ConfigError("tsne: perplexity must be positive");
  if (iterations < 250) throw ConfigError("tsne: at least 250 iterations are required");
  if (!(learning_rate > 0.0)) throw ConfigError("tsne: learning_rate must be positive");
  if (!(exaggeration >= 1.0)) throw ConfigError("tsne: exaggeration must be >= 1");
  if (kl_every == 0) throw ConfigError("tsne: kl_every must be >= 1");
}

Matrix flatten_series(const std::vector<data::MultivariateSeries>& series) {
  if (series.empty()) throw ContractError("flatten_series: no series");
  const std::size_t width = series.front().values.size();
  Matrix out(series.size(), width, 0.0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.values.rows() != series.front().values.rows() || s.values.cols() != series.front().values.cols()) {
      throw ShapeError("flatten_series: series " + std::to_string(i) + " has a different shape");
    }
    std::copy(s.values.data().begin(), s.values.data().end(), out.row(i).begin());
  }
  return out;
}

Matrix joint_affinities(const Matrix& points, double perplexity) {
  const std::size_t n = points.rows();
  const auto d = squared_distances(points);
  const double target = std::log(perplexity);
  Matrix cond(n, n, 0.0);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (std::size_t step = 0; step < kSearchSteps; ++step) {
      // Shift by the nearest neighbour distance so exp() cannot underflow for every j.
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) dmin = std::min(dmin, d[i * n + j]);
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = j == i ? 0.0 : std::exp(-beta * (d[i * n + j] - dmin));
        sum += row[j];
        weighted += row[j] * (d[i * n + j] - dmin);
      }
      const double h = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) cond(i, j) = row[j] / sum;
      const double gap = h - target;
      if (std::abs(gap) < kPerplexityTolerance) break;
      if (gap > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
  }
  Matrix p(n, n, 0.0);
  const double norm = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) p(i, j) = std::max((cond(i, j) + cond(j, i)) / norm, kFloor);
  return p;
}

double kl_divergence(const Matrix& p, const Matrix& embedding) {
  const std::size_t n = p.rows();
  std::vector<double> num;
  const double total = student_t(embedding, num);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = std::max(num[i * n + j] / total, kFloor);
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  }
  return kl;
}

TsneResult tsne_embed(const Matrix& points, const TsneConfig& config) {
  config.validate();
  const std::size_t n = points.rows();
  if (n < 5) throw ContractError("tsne: need at least 5 points, got " + std::to_string(n));
  if (config.perplexity >= static_cast<double>(n - 1) / 3.0) {
    throw ContractError("tsne: perplexity " + std::to_string(config.perplexity) + " is infeasible for " +
                        std::to_string(n) + " points (must be < (n-1)/3)");
  }
  for (double v : points.data()) {
    if (!std::isfinite(v)) throw DataError("tsne: input contains non-finite values");
  }

  const Matrix p = joint_affinities(points, config.perplexity);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> init(0.0, 1e-4);
  TsneResult result;
  Matrix& y = result.embedding;
  y = Matrix(n, 2, 0.0);
  for (double& v : y.data()) v = init(rng);
  Matrix velocity(n, 2, 0.0), gains(n, 2, 1.0), grad(n, 2, 0.0);
  std::vector<double> num;

  for (std::size_t iter = 1; iter <= config.iterations; ++iter) {
    const double exaggeration = iter <= config.exaggeration_iterations ? config.exaggeration : 1.0;
    const double momentum = iter <= config.momentum_switch ? config.initial_momentum : config.final_momentum;
    // Velocity built up against the exaggerated objective is dropped when it ends.
    if (iter == config.exaggeration_iterations + 1) std::fill(velocity.data().begin(), velocity.data().end(), 0.0);
    const double total = student_t(y, num);
    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = std::max(num[i * n + j] / total, kFloor);
        const double w = (exaggeration * p(i, j) - q) * num[i * n + j];
        gx += w * (y(i, 0) - y(j, 0));
        gy += w * (y(i, 1) - y(j, 1));
      }
      grad(i, 0) = 4.0 * gx;
      grad(i, 1) = 4.0 * gy;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 2; ++c) {
        if (config.adaptive_gains) {
          const bool same_sign = (grad(i, c) > 0.0) == (velocity(i, c) > 0.0);
          gains(i, c) = std::max(same_sign ? gains(i, c) * 0.8 : gains(i, c) + 0.2, 0.01);
        }
        velocity(i, c) = momentum * velocity(i, c) - config.learning_rate * gains(i, c) * grad(i, c);
        y(i, c) += velocity(i, c);
      }
    }
    for (std::size_t c = 0; c < 2; ++c) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i) m += y(i, c);
      m /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, c) -= m;
    }
    if (iter % config.kl_every == 0 || iter == config.iterations) {
      result.kl_history.emplace_back(iter, kl_divergence(p, y));
    }
  }
  return result;
}

}  // namespace tsaae::eval
