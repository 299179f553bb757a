#include "tsaae/eval/dtw.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "tsaae/error.hpp"

namespace tsaae::eval {
namespace {

double dtw_rows(const Matrix& a, std::size_t la, const Matrix& b, std::size_t lb) {
  if (a.cols() != b.cols()) {
    throw ShapeError("dtw: series have " + std::to_string(a.cols()) + " and " + std::to_string(b.cols()) + " variables");
  }
  if (la == 0 || lb == 0) throw ContractError("dtw: empty series");
  const std::size_t v = a.cols();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(lb + 1, inf), cur(lb + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= la; ++i) {
    cur[0] = inf;
    const auto ra = a.row(i - 1);
    for (std::size_t j = 1; j <= lb; ++j) {
      const auto rb = b.row(j - 1);
      double cost = 0.0;
      for (std::size_t c = 0; c < v; ++c) {
        const double d = ra[c] - rb[c];
        cost += d * d;
      }
      cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[lb];
}

}  // namespace

double dtw_distance(const Matrix& a, const Matrix& b) { return dtw_rows(a, a.rows(), b, b.rows()); }

double dtw_distance(const data::MultivariateSeries& a, const data::MultivariateSeries& b) {
  return dtw_rows(a.values, a.valid_length(), b.values, b.valid_length());
}

NearestMatch avg_min_dtw(const std::vector<data::MultivariateSeries>& generated,
                         const std::vector<data::MultivariateSeries>& reference, std::size_t threads) {
  if (generated.empty()) throw ContractError("avg_min_dtw: no generated series");
  if (reference.empty()) throw ContractError("avg_min_dtw: no reference series");
  NearestMatch out;
  out.per_sample.assign(generated.size(), 0.0);
  out.nearest.assign(generated.size(), 0);
  auto work = [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < reference.size(); ++j) {
        const double d = dtw_distance(generated[i], reference[j]);
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
      out.per_sample[i] = best;
      out.nearest[i] = best_j;
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, generated.size());
  if (threads == 1) {
    work(0, generated.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (generated.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t first = t * chunk, last = std::min(generated.size(), first + chunk);
      if (first < last) pool.emplace_back(work, first, last);
    }
  }
  double total = 0.0;
  for (double d : out.per_sample) total += d;
  out.average = total / static_cast<double>(generated.size());
  return out;
}

}  // namespace tsaae::eval
