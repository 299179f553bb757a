#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsaae/data/series.hpp"
#include "tsaae/keyvalue.hpp"
#include "tsaae/matrix.hpp"
#include "tsaae/model/model.hpp"

namespace tsaae::eval {

struct TestError {
  double mse = 0.0;        // mean squared error per valid element, pooled over the split
  double frobenius = 0.0;  // mean per-series Frobenius norm of the residual
};

/// Teacher-forced reconstruction error of a normalized split.
TestError test_error(const model::GenerativeModel& model, const std::vector<data::MultivariateSeries>& normalized);

struct MetricsReport {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t n_generated = 0;
  double avg_min_dtw = 0.0;
  double entropy = 0.0;
  double test_error = 0.0;
  double test_error_frobenius = 0.0;
  std::vector<double> per_sample_dtw;
  std::vector<double> per_dim_entropy;
};

// Published TAE figures on NATOPS, printed as a comparison footer.
struct ReferenceRow {
  double avg_dtw = 28.273;
  double entropy = 0.544;
  double test_error = 0.018;
};

/// Generates n series from the model, then scores them against the (normalized)
/// validation split: nearest-match DTW, four-category entropy and test error.
MetricsReport build_report(const model::GenerativeModel& model, const data::Dataset& normalized,
                           std::size_t n_generated, std::uint64_t seed, std::size_t threads = 1);

KeyValueText report_text(const MetricsReport& report);
MetricsReport report_from_text(const KeyValueText& text);

/// Writes report.txt, per_sample_dtw.csv and per_dim_entropy.csv into `dir`.
void write_report(const MetricsReport& report, const std::filesystem::path& dir);

/// id,x,y,source,label rows.
std::string embedding_csv(const Matrix& embedding, const std::vector<std::string>& sources,
                          const std::vector<std::string>& labels);

/// Scatter plot: "real" points blue, "generated" points orange.
std::string embedding_svg(const Matrix& embedding, const std::vector<std::string>& sources);

}  // namespace tsaae::eval
