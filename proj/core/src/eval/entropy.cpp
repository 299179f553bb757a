#include "tsaae/eval/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsaae/error.hpp"

namespace tsaae::eval {

std::vector<Category> default_categories() {
  const double inf = std::numeric_limits<double>::infinity();
  return {{1.0, inf}, {0.0, 1.0}, {-1.0, 0.0}, {-inf, -1.0}};
}

void validate_categories(const std::vector<Category>& categories) {
  if (categories.size() < 2) throw ConfigError("entropy needs at least two categories");
  auto sorted = categories;
  std::sort(sorted.begin(), sorted.end(), [](const Category& a, const Category& b) { return a.lower < b.lower; });
  if (sorted.front().lower != -std::numeric_limits<double>::infinity() ||
      sorted.back().upper != std::numeric_limits<double>::infinity()) {
    throw ConfigError("entropy categories must cover the whole real line");
  }
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i].lower < sorted[i].upper)) throw ConfigError("entropy category " + std::to_string(i) + " is empty");
    if (i + 1 < sorted.size() && sorted[i].upper != sorted[i + 1].lower) {
      throw ConfigError("entropy categories leave a gap or overlap at " + std::to_string(sorted[i].upper));
    }
  }
}

double normalized_entropy(const std::vector<std::size_t>& counts) {
  if (counts.size() < 2) throw ContractError("normalized_entropy: need at least two categories");
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw ContractError("normalized_entropy: no observations");
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return std::clamp(h / std::log(static_cast<double>(counts.size())), 0.0, 1.0);
}

EntropyResult entropy(const std::vector<data::MultivariateSeries>& series, const std::vector<Category>& categories) {
  validate_categories(categories);
  if (series.empty()) throw ContractError("entropy: no series");
  const std::size_t v = series.front().variables();
  std::vector<std::vector<std::size_t>> counts(v, std::vector<std::size_t>(categories.size(), 0));
  for (const auto& s : series) {
    if (s.variables() != v) throw ShapeError("entropy: series disagree on the variable count");
    for (std::size_t t = 0; t < s.length(); ++t) {
      if (!s.is_valid(t)) continue;
      for (std::size_t i = 0; i < v; ++i) {
        const double x = s.values(t, i);
        if (std::isnan(x)) throw DataError("entropy: NaN at step " + std::to_string(t) + ", variable " + std::to_string(i));
        const auto it = std::find_if(categories.begin(), categories.end(), [&](const Category& c) { return c.contains(x); });
        ++counts[i][static_cast<std::size_t>(it - categories.begin())];
      }
    }
  }
  EntropyResult r;
  r.max_entropy = std::log(static_cast<double>(categories.size()));
  for (std::size_t i = 0; i < v; ++i) {
    r.per_variable.push_back(normalized_entropy(counts[i]));
    r.mean += r.per_variable.back();
  }
  r.mean /= static_cast<double>(v);
  return r;
}

}  // namespace tsaae::eval
