#include "tsaae/model/model.hpp"

#include "tsaae/diff/ops.hpp"
#include "tsaae/error.hpp"
#include "tsaae/model/conv_ae.hpp"
#include "tsaae/model/transformer.hpp"

namespace tsaae::model {

std::string_view model_kind_name(ModelKind kind) { return kind == ModelKind::tae ? "tae" : "cae"; }

ModelKind parse_model_kind(std::string_view name) {
  if (name == "tae") return ModelKind::tae;
  if (name == "cae") return ModelKind::cae;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected tae or cae)");
}

diff::Tensor residual(const Reconstruction& r) {
  diff::Tensor res = diff::sub(r.prediction, r.target);
  if (r.weight.defined()) res = diff::mul(res, r.weight);
  return res;
}

diff::Tensor frobenius_loss(const Reconstruction& r) { return diff::sqrt(diff::sum(diff::square(residual(r)))); }

diff::Tensor mse_loss(const Reconstruction& r) {
  if (r.valid_elements == 0) throw DataError("reconstruction has no valid elements");
  return diff::scale(diff::sum(diff::square(residual(r))), 1.0 / static_cast<double>(r.valid_elements));
}

std::unique_ptr<GenerativeModel> make_model(const KeyValueText& config) {
  const ModelKind kind = parse_model_kind(config.get_string("model"));
  if (kind == ModelKind::tae) return std::make_unique<TransformerAutoencoder>(TransformerConfig::read(config, "tae."));
  return std::make_unique<ConvAutoencoder>(CaeConfig::read(config, "cae."));
}

void load_parameter_values(diff::ParameterStore& into, const diff::ParameterStore& from) {
  for (auto& e : into.entries()) {
    if (!from.contains(e.name)) throw CompatibilityError("parameter '" + e.name + "' missing from source");
    const auto& src = from.get(e.name);
    if (src.shape() != e.tensor.shape()) {
      throw CompatibilityError("parameter '" + e.name + "' has shape " + diff::shape_string(src.shape()) +
                               ", expected " + diff::shape_string(e.tensor.shape()));
    }
    std::copy(src.values().begin(), src.values().end(), e.tensor.mutable_values().begin());
  }
}

diff::Tensor to_tensor(const Matrix& m) { return diff::Tensor::matrix(m.rows(), m.cols(), m.data()); }

Matrix to_matrix(const diff::Tensor& t) {
  return Matrix(t.rows(), t.cols(), std::vector<double>(t.values().begin(), t.values().end()));
}

}  // namespace tsaae::model
