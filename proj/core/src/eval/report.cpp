#include "tsaae/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tsaae/adversarial/trainer.hpp"
#include "tsaae/diff/tensor.hpp"
#include "tsaae/error.hpp"
#include "tsaae/eval/dtw.hpp"
#include "tsaae/eval/entropy.hpp"

namespace tsaae::eval {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

std::string format_fixed(double v, int digits) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

}  // namespace

TestError test_error(const model::GenerativeModel& model, const std::vector<data::MultivariateSeries>& normalized) {
  if (normalized.empty()) throw ContractError("test_error: empty split");
  const auto framed = adversarial::frame_for_model(model, normalized);
  diff::NoGradGuard no_grad;
  double squared = 0.0, frobenius = 0.0;
  std::size_t elements = 0;
  for (const auto& s : framed) {
    const auto r = model.reconstruct(model.prepare(s));
    const double sq = diff::sum(diff::square(model::residual(r))).item();
    squared += sq;
    frobenius += std::sqrt(sq);
    elements += r.valid_elements;
  }
  if (elements == 0) throw DataError("test_error: no valid elements");
  return {squared / static_cast<double>(elements), frobenius / static_cast<double>(framed.size())};
}

MetricsReport build_report(const model::GenerativeModel& model, const data::Dataset& normalized,
                           std::size_t n_generated, std::uint64_t seed, std::size_t threads) {
  if (normalized.validation.empty()) throw DataError("build_report: validation split is empty");
  if (n_generated == 0) throw ContractError("build_report: n_generated must be >= 1");
  MetricsReport r;
  r.model = std::string(model::model_kind_name(model.kind()));
  r.seed = seed;
  r.n_generated = n_generated;
  const auto generated = adversarial::generate_batch(model, n_generated, seed);
  const auto match = avg_min_dtw(generated.series, normalized.validation, threads);
  r.avg_min_dtw = match.average;
  r.per_sample_dtw = match.per_sample;
  const auto h = entropy(generated.series);
  r.entropy = h.mean;
  r.per_dim_entropy = h.per_variable;
  const auto te = test_error(model, normalized.validation);
  r.test_error = te.mse;
  r.test_error_frobenius = te.frobenius;
  return r;
}

KeyValueText report_text(const MetricsReport& r) {
  KeyValueText kv;
  kv.set("model", r.model);
  kv.set("seed", r.seed);
  kv.set("n_generated", static_cast<std::uint64_t>(r.n_generated));
  kv.set("avg_dtw", r.avg_min_dtw);
  kv.set("entropy", r.entropy);
  kv.set("test_error", r.test_error);
  kv.set("test_error_frobenius", r.test_error_frobenius);
  kv.set("per_sample_dtw", r.per_sample_dtw);
  kv.set("per_dim_entropy", r.per_dim_entropy);
  return kv;
}

MetricsReport report_from_text(const KeyValueText& kv) {
  MetricsReport r;
  r.model = kv.get_string("model");
  r.seed = static_cast<std::uint64_t>(kv.get_int("seed"));
  r.n_generated = static_cast<std::size_t>(kv.get_int("n_generated"));
  r.avg_min_dtw = kv.get_double("avg_dtw");
  r.entropy = kv.get_double("entropy");
  r.test_error = kv.get_double("test_error");
  r.test_error_frobenius = kv.get_double("test_error_frobenius");
  r.per_sample_dtw = kv.get_doubles("per_sample_dtw");
  r.per_dim_entropy = kv.get_doubles("per_dim_entropy");
  return r;
}

void write_report(const MetricsReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const ReferenceRow ref;
  std::string text = report_text(report).to_string();
  text += "# reference (published TAE on NATOPS): avg_dtw = " + format_fixed(ref.avg_dtw, 3) +
          ", entropy = " + format_fixed(ref.entropy, 3) + ", test_error = " + format_fixed(ref.test_error, 3) + "\n";
  write_text(dir / "report.txt", text);

  std::string dtw = "sample,min_dtw\n";
  for (std::size_t i = 0; i < report.per_sample_dtw.size(); ++i) {
    dtw += std::to_string(i) + "," + format_double(report.per_sample_dtw[i]) + "\n";
  }
  write_text(dir / "per_sample_dtw.csv", dtw);

  std::string ent = "variable,entropy\n";
  for (std::size_t i = 0; i < report.per_dim_entropy.size(); ++i) {
    ent += std::to_string(i) + "," + format_double(report.per_dim_entropy[i]) + "\n";
  }
  write_text(dir / "per_dim_entropy.csv", ent);
}

std::string embedding_csv(const Matrix& embedding, const std::vector<std::string>& sources,
                          const std::vector<std::string>& labels) {
  if (sources.size() != embedding.rows() || labels.size() != embedding.rows()) {
    throw ContractError("embedding_csv: one source and label per point required");
  }
  std::string out = "id,x,y,source,label\n";
  for (std::size_t i = 0; i < embedding.rows(); ++i) {
    out += std::to_string(i) + "," + format_double(embedding(i, 0)) + "," + format_double(embedding(i, 1)) + "," +
           sources[i] + "," + labels[i] + "\n";
  }
  return out;
}

std::string embedding_svg(const Matrix& embedding, const std::vector<std::string>& sources) {
  if (sources.size() != embedding.rows()) throw ContractError("embedding_svg: one source per point required");
  constexpr double size = 600.0, margin = 30.0;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (embedding.rows() > 0) {
    xmin = xmax = embedding(0, 0);
    ymin = ymax = embedding(0, 1);
    for (std::size_t i = 0; i < embedding.rows(); ++i) {
      xmin = std::min(xmin, embedding(i, 0));
      xmax = std::max(xmax, embedding(i, 0));
      ymin = std::min(ymin, embedding(i, 1));
      ymax = std::max(ymax, embedding(i, 1));
    }
  }
  const double xs = (size - 2 * margin) / std::max(xmax - xmin, 1e-12);
  const double ys = (size - 2 * margin) / std::max(ymax - ymin, 1e-12);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << " " << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < embedding.rows(); ++i) {
    const double cx = margin + (embedding(i, 0) - xmin) * xs;
    const double cy = size - margin - (embedding(i, 1) - ymin) * ys;
    const char* color = sources[i] == "generated" ? "#ff7f0e" : "#1f77b4";
    svg << "<circle cx=\"" << format_fixed(cx, 2) << "\" cy=\"" << format_fixed(cy, 2) << "\" r=\"4\" fill=\"" << color
        << "\" fill-opacity=\"0.8\"><title>" << i << " " << sources[i] << "</title></circle>\n";
  }
  svg << "<text x=\"" << margin << "\" y=\"20\" font-size=\"12\" fill=\"#1f77b4\">real</text>\n";
  svg << "<text x=\"" << margin + 50 << "\" y=\"20\" font-size=\"12\" fill=\"#ff7f0e\">generated</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace tsaae::eval
