#include "tsaae/diff/gradcheck.hpp"

#include <cmath>

#include "tsaae/error.hpp"

namespace tsaae::diff {

GradCheckResult grad_check(const LossBuilder& build_loss, ParameterStore& store, double eps) {
  if (eps < 1e-7 || eps > 1e-3) throw ContractError("grad_check: eps must lie in [1e-7, 1e-3]");

  store.zero_grad();
  {
    const Tensor loss = build_loss(store);
    if (!std::isfinite(loss.item())) throw NumericError("grad_check: loss is not finite at the base point");
    backward(loss);
  }

  GradCheckResult result;
  for (auto& e : store.entries()) {
    std::vector<double> analytic(e.tensor.size(), 0.0);
    if (e.tensor.has_grad()) {
      const auto g = e.tensor.grad();
      analytic.assign(g.begin(), g.end());
    }
    auto w = e.tensor.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      double plus = 0.0, minus = 0.0;
      {
        NoGradGuard no_grad;
        w[i] = saved + eps;
        plus = build_loss(store).item();
        w[i] = saved - eps;
        minus = build_loss(store).item();
      }
      w[i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NumericError("grad_check: non-finite loss when perturbing " + e.name + "[" + std::to_string(i) + "]");
      }
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err = std::abs(analytic[i] - numeric) / std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
      ++result.coordinates;
      if (result.worst_parameter.empty() || err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = e.name;
        result.worst_index = i;
        result.analytic = analytic[i];
        result.numeric = numeric;
      }
    }
  }
  store.zero_grad();
  return result;
}

}  // namespace tsaae::diff
