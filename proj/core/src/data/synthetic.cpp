#include "tsaae/data/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace tsaae::data {
namespace {

std::vector<MultivariateSeries> make_split(const SinusoidSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, spec.noise);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  std::uniform_real_distribution<double> phase(0.0, 0.5);
  std::vector<MultivariateSeries> out;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t i = 0; i < spec.series_per_class; ++i) {
      MultivariateSeries s;
      s.label = std::to_string(c + 1);
      s.values = Matrix(spec.length, spec.variables);
      const double amp = jitter(rng);
      const double shift = phase(rng);
      for (std::size_t j = 0; j < spec.variables; ++j) {
        const double offset = static_cast<double>(j) * std::numbers::pi / static_cast<double>(spec.variables);
        for (std::size_t t = 0; t < spec.length; ++t) {
          const double x = static_cast<double>(t) / static_cast<double>(spec.length);
          s.values(t, j) = amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(c + 1) * (x + shift) + offset) +
                           noise(rng);
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace

Dataset make_sinusoid_dataset(const SinusoidSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  Dataset ds;
  ds.name = "Sinusoids";
  for (std::size_t c = 0; c < spec.classes; ++c) ds.class_labels.push_back(std::to_string(c + 1));
  ds.train = make_split(spec, rng);
  ds.validation = make_split(spec, rng);
  return ds;
}

}  // namespace tsaae::data
