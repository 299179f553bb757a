#include "tsaae/diff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsaae/error.hpp"

namespace tsaae::diff {
namespace {

using detail::Node;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

void require_matrix(const Tensor& a, const char* op) {
  if (a.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got shape " + shape_string(a.shape()));
  }
}

Node& parent(Node& self, std::size_t i) { return *self.parents[i]; }

// C[m×p] += A[m×n] · B[n×p]
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t p) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * p;
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0.0) continue;
      const double* brow = b + k * p;
      for (std::size_t j = 0; j < p; ++j) crow[j] += aik * brow[j];
    }
  }
}

// C[m×p] += A[m×n] · B[p×n]ᵀ
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t p) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * n;
    for (std::size_t j = 0; j < p; ++j) {
      const double* brow = b + j * n;
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += arow[k] * brow[k];
      c[i * p + j] += acc;
    }
  }
}

// C[n×p] += A[m×n]ᵀ · B[m×p]
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t p) {
  for (std::size_t k = 0; k < m; ++k) {
    const double* arow = a + k * n;
    const double* brow = b + k * p;
    for (std::size_t i = 0; i < n; ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* crow = c + i * p;
      for (std::size_t j = 0; j < p; ++j) crow[j] += aki * brow[j];
    }
  }
}

template <typename F, typename D>
Tensor unary(const Tensor& x, F forward, D derivative) {
  std::vector<double> out(x.size());
  const auto in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = forward(in[i]);
  return make_result(x.shape(), std::move(out), {x}, [derivative](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * derivative(p.value[i], self.value[i]);
  });
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "linear") return Activation::linear;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "relu") return Activation::relu;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::string_view activation_name(Activation fn) {
  switch (fn) {
    case Activation::linear: return "linear";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::relu: return "relu";
  }
  return "?";
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.shape()[0], n = a.shape()[1], p = b.shape()[1];
  if (b.shape()[0] != n) {
    throw ShapeError("matmul: inner dimensions differ, " + shape_string(a.shape()) + " x " +
                     shape_string(b.shape()));
  }
  std::vector<double> out(m * p, 0.0);
  gemm_nn(a.values().data(), b.values().data(), out.data(), m, n, p);
  return make_result({m, p}, std::move(out), {a, b}, [m, n, p](Node& self) {
    Node& pa = parent(self, 0);
    Node& pb = parent(self, 1);
    if (pa.requires_grad) gemm_nt(self.grad.data(), pb.value.data(), pa.ensure_grad().data(), m, p, n);
    if (pb.requires_grad) gemm_tn(pa.value.data(), self.grad.data(), pb.ensure_grad().data(), m, n, p);
  });
}

Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  const std::size_t r = a.shape()[0], c = a.shape()[1];
  std::vector<double> out(r * c);
  const auto in = a.values();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = in[i * c + j];
  return make_result({c, r}, std::move(out), {a}, [r, c](Node& self) {
    Node& p = parent(self, 0);
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[j * r + i];
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_matrix(weight, "linear");
  const std::size_t m = x.rows(), in = x.cols(), out_dim = weight.shape()[0];
  if (weight.shape()[1] != in) {
    throw ShapeError("linear: input width " + std::to_string(in) + " does not match weight " +
                     shape_string(weight.shape()));
  }
  if (bias.defined() && bias.size() != out_dim) {
    throw ShapeError("linear: bias " + shape_string(bias.shape()) + " does not match weight " +
                     shape_string(weight.shape()));
  }
  std::vector<double> out(m * out_dim, 0.0);
  if (bias.defined()) {
    const auto b = bias.values();
    for (std::size_t i = 0; i < m; ++i) std::copy(b.begin(), b.end(), out.begin() + static_cast<long>(i * out_dim));
  }
  gemm_nt(x.values().data(), weight.values().data(), out.data(), m, in, out_dim);
  Shape shape = x.shape();
  if (shape.empty()) shape = {1};
  shape.back() = out_dim;
  std::vector<Tensor> parents{x, weight};
  const bool has_bias = bias.defined();
  if (has_bias) parents.push_back(bias);
  return make_result(std::move(shape), std::move(out), std::move(parents), [m, in, out_dim, has_bias](Node& self) {
    Node& px = parent(self, 0);
    Node& pw = parent(self, 1);
    if (px.requires_grad) gemm_nn(self.grad.data(), pw.value.data(), px.ensure_grad().data(), m, out_dim, in);
    if (pw.requires_grad) gemm_tn(self.grad.data(), px.value.data(), pw.ensure_grad().data(), m, out_dim, in);
    if (has_bias) {
      Node& pb = parent(self, 2);
      if (pb.requires_grad) {
        auto& gb = pb.ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < out_dim; ++j) gb[j] += self.grad[i * out_dim + j];
      }
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  const auto x = a.values(), y = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      Node& p = parent(self, k);
      if (!p.requires_grad) continue;
      auto& g = p.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  const auto x = a.values(), y = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& pa = parent(self, 0);
    Node& pb = parent(self, 1);
    if (pa.requires_grad) {
      auto& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  const auto x = a.values(), y = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& pa = parent(self, 0);
    Node& pb = parent(self, 1);
    if (pa.requires_grad) {
      auto& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  return unary(x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double offset) {
  return unary(x, [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Tensor add_row(const Tensor& x, const Tensor& row) {
  const std::size_t r = x.rows(), c = x.cols();
  if (row.size() != c) {
    throw ShapeError("add_row: row " + shape_string(row.shape()) + " does not match " + shape_string(x.shape()));
  }
  std::vector<double> out(x.size());
  const auto xv = x.values(), rv = row.values();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = xv[i * c + j] + rv[j];
  return make_result(x.shape(), std::move(out), {x, row}, [r, c](Node& self) {
    Node& px = parent(self, 0);
    Node& pr = parent(self, 1);
    if (px.requires_grad) {
      auto& g = px.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pr.requires_grad) {
      auto& g = pr.ensure_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) g[j] += self.grad[i * c + j];
    }
  });
}

Tensor softmax_rows(const Tensor& x) {
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> out(x.size());
  const auto in = x.values();
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = in.data() + i * c;
    const double hi = *std::max_element(row, row + c);
    if (hi == -std::numeric_limits<double>::infinity()) {
      throw NumericError("softmax_rows: row " + std::to_string(i) + " is entirely masked (-inf)");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out[i * c + j] = std::exp(row[j] - hi);
      total += out[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= total;
  }
  return make_result(x.shape(), std::move(out), {x}, [r, c](Node& self) {
    Node& p = parent(self, 0);
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < r; ++i) {
      const double* y = self.value.data() + i * c;
      const double* gy = self.grad.data() + i * c;
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += y[j] * gy[j];
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += y[j] * (gy[j] - dot);
    }
  });
}

Tensor activate(const Tensor& x, Activation fn) {
  switch (fn) {
    case Activation::linear:
      return unary(x, [](double v) { return v; }, [](double, double) { return 1.0; });
    case Activation::tanh:
      return unary(x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
    case Activation::sigmoid:
      return unary(
          x,
          [](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); },
          [](double, double y) { return y * (1.0 - y); });
    case Activation::relu:
      return unary(x, [](double v) { return v > 0 ? v : 0.0; }, [](double v, double) { return v > 0 ? 1.0 : 0.0; });
  }
  throw ContractError("activate: unknown activation");
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  const std::size_t r = x.rows(), d = x.cols();
  if (d == 0) throw ShapeError("layer_norm: empty last axis");
  if (gain.size() != d || bias.size() != d) {
    throw ShapeError("layer_norm: gain/bias must have length " + std::to_string(d));
  }
  std::vector<double> out(x.size());
  auto xhat = std::make_shared<std::vector<double>>(x.size());
  auto inv_std = std::make_shared<std::vector<double>>(r);
  const auto in = x.values(), gv = gain.values(), bv = bias.values();
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = in.data() + i * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[i] = is;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (row[j] - mu) * is;
      (*xhat)[i * d + j] = h;
      out[i * d + j] = h * gv[j] + bv[j];
    }
  }
  return make_result(x.shape(), std::move(out), {x, gain, bias}, [r, d, xhat, inv_std](Node& self) {
    Node& px = parent(self, 0);
    Node& pg = parent(self, 1);
    Node& pb = parent(self, 2);
    if (pg.requires_grad || pb.requires_grad) {
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const double g = self.grad[i * d + j];
          if (pg.requires_grad) pg.ensure_grad()[j] += g * (*xhat)[i * d + j];
          if (pb.requires_grad) pb.ensure_grad()[j] += g;
        }
      }
    }
    if (!px.requires_grad) return;
    auto& gx = px.ensure_grad();
    const double inv_d = 1.0 / static_cast<double>(d);
    for (std::size_t i = 0; i < r; ++i) {
      double mean_dh = 0.0, mean_dh_h = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double dh = self.grad[i * d + j] * pg.value[j];
        mean_dh += dh;
        mean_dh_h += dh * (*xhat)[i * d + j];
      }
      mean_dh *= inv_d;
      mean_dh_h *= inv_d;
      for (std::size_t j = 0; j < d; ++j) {
        const double dh = self.grad[i * d + j] * pg.value[j];
        gx[i * d + j] += (*inv_std)[i] * (dh - mean_dh - (*xhat)[i * d + j] * mean_dh_h);
      }
    }
  });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return make_result({}, {total}, {x}, [](Node& self) {
    auto& g = parent(self, 0).ensure_grad();
    for (auto& gi : g) gi += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  if (x.size() == 0) throw ContractError("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor square(const Tensor& x) {
  return unary(x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor sqrt(const Tensor& x) {
  return unary(
      x, [](double v) { return std::sqrt(v); }, [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Tensor log(const Tensor& x) {
  return unary(x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  return unary(
      x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v, double) { return (v < lo || v > hi) ? 0.0 : 1.0; });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw ShapeError("reshape: cannot view " + shape_string(x.shape()) + " as " + shape_string(shape));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  return make_result(std::move(shape), std::move(out), {x}, [](Node& self) {
    auto& g = parent(self, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor slice_cols(const Tensor& x, std::size_t first, std::size_t count) {
  const std::size_t r = x.rows(), c = x.cols();
  if (first + count > c) {
    throw ShapeError("slice_cols: [" + std::to_string(first) + ", " + std::to_string(first + count) +
                     ") out of range for " + shape_string(x.shape()));
  }
  std::vector<double> out(r * count);
  const auto in = x.values();
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(in.data() + i * c + first, count, out.data() + i * count);
  return make_result({r, count}, std::move(out), {x}, [r, c, first, count](Node& self) {
    auto& g = parent(self, 0).ensure_grad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < count; ++j) g[i * c + first + j] += self.grad[i * count + j];
  });
}

Tensor slice_rows(const Tensor& x, std::size_t first, std::size_t count) {
  const std::size_t r = x.rows(), c = x.cols();
  if (first + count > r) {
    throw ShapeError("slice_rows: [" + std::to_string(first) + ", " + std::to_string(first + count) +
                     ") out of range for " + shape_string(x.shape()));
  }
  std::vector<double> out(x.values().begin() + static_cast<long>(first * c),
                          x.values().begin() + static_cast<long>((first + count) * c));
  return make_result({count, c}, std::move(out), {x}, [c, first](Node& self) {
    auto& g = parent(self, 0).ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[first * c + i] += self.grad[i];
  });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const std::size_t r = parts[0].rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.rows() != r) throw ShapeError("concat_cols: row counts differ");
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<double> out(r * total);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const auto in = p.values();
    const std::size_t w = p.cols();
    for (std::size_t i = 0; i < r; ++i) std::copy_n(in.data() + i * w, w, out.data() + i * total + offset);
    offset += w;
  }
  return make_result({r, total}, std::move(out), {parts.begin(), parts.end()}, [r, total, widths](Node& self) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      Node& p = parent(self, k);
      const std::size_t w = widths[k];
      if (p.requires_grad) {
        auto& g = p.ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < w; ++j) g[i * w + j] += self.grad[i * total + off + j];
      }
      off += w;
    }
  });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  const std::size_t c = parts[0].cols();
  std::size_t total = 0;
  std::vector<std::size_t> sizes;
  for (const auto& p : parts) {
    if (p.cols() != c) throw ShapeError("concat_rows: column counts differ");
    total += p.rows();
    sizes.push_back(p.size());
  }
  std::vector<double> out;
  out.reserve(total * c);
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  return make_result({total, c}, std::move(out), {parts.begin(), parts.end()}, [sizes](Node& self) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      Node& p = parent(self, k);
      if (p.requires_grad) {
        auto& g = p.ensure_grad();
        for (std::size_t i = 0; i < sizes[k]; ++i) g[i] += self.grad[off + i];
      }
      off += sizes[k];
    }
  });
}

Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel) {
  const std::size_t cin = x.rows(), len = x.cols();
  const std::size_t cout = weight.rows();
  if (kernel == 0 || weight.cols() != cin * kernel) {
    throw ShapeError("conv1d: weight " + shape_string(weight.shape()) + " incompatible with " +
                     std::to_string(cin) + " input channels and kernel " + std::to_string(kernel));
  }
  if (bias.size() != cout) throw ShapeError("conv1d: bias length must equal output channels");
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>((kernel - 1) / 2);
  const auto xv = x.values(), wv = weight.values(), bv = bias.values();
  std::vector<double> out(cout * len);
  for (std::size_t co = 0; co < cout; ++co) {
    double* orow = out.data() + co * len;
    std::fill(orow, orow + len, bv[co]);
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double* xrow = xv.data() + ci * len;
      const double* w = wv.data() + co * cin * kernel + ci * kernel;
      for (std::size_t j = 0; j < kernel; ++j) {
        const double wj = w[j];
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
        const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(len),
                                                           static_cast<std::ptrdiff_t>(len) - shift);
        for (std::ptrdiff_t t = t0; t < t1; ++t) orow[t] += wj * xrow[t + shift];
      }
    }
  }
  return make_result({cout, len}, std::move(out), {x, weight, bias}, [=](Node& self) {
    Node& px = parent(self, 0);
    Node& pw = parent(self, 1);
    Node& pb = parent(self, 2);
    double* gx = px.requires_grad ? px.ensure_grad().data() : nullptr;
    double* gw = pw.requires_grad ? pw.ensure_grad().data() : nullptr;
    double* gb = pb.requires_grad ? pb.ensure_grad().data() : nullptr;
    for (std::size_t co = 0; co < cout; ++co) {
      const double* grow = self.grad.data() + co * len;
      if (gb) {
        for (std::size_t t = 0; t < len; ++t) gb[co] += grow[t];
      }
      for (std::size_t ci = 0; ci < cin; ++ci) {
        const double* xrow = px.value.data() + ci * len;
        const std::size_t woff = co * cin * kernel + ci * kernel;
        for (std::size_t j = 0; j < kernel; ++j) {
          const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
          const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
          const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(len),
                                                             static_cast<std::ptrdiff_t>(len) - shift);
          if (gw) {
            double acc = 0.0;
            for (std::ptrdiff_t t = t0; t < t1; ++t) acc += grow[t] * xrow[t + shift];
            gw[woff + j] += acc;
          }
          if (gx) {
            const double wj = pw.value[woff + j];
            double* gxrow = gx + ci * len;
            for (std::ptrdiff_t t = t0; t < t1; ++t) gxrow[t + shift] += wj * grow[t];
          }
        }
      }
    }
  });
}

Tensor conv_transpose1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel) {
  const std::size_t cin = x.rows(), len = x.cols();
  if (kernel == 0 || weight.rows() != cin || weight.cols() % kernel != 0) {
    throw ShapeError("conv_transpose1d: weight " + shape_string(weight.shape()) + " incompatible with " +
                     std::to_string(cin) + " input channels and kernel " + std::to_string(kernel));
  }
  const std::size_t cout = weight.cols() / kernel;
  if (bias.size() != cout) throw ShapeError("conv_transpose1d: bias length must equal output channels");
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>((kernel - 1) / 2);
  const auto xv = x.values(), wv = weight.values(), bv = bias.values();
  // y[co, t + j - pad] += w[ci, co, j] * x[ci, t]
  std::vector<double> out(cout * len);
  for (std::size_t co = 0; co < cout; ++co) std::fill_n(out.data() + co * len, len, bv[co]);
  for (std::size_t ci = 0; ci < cin; ++ci) {
    const double* xrow = xv.data() + ci * len;
    for (std::size_t co = 0; co < cout; ++co) {
      double* orow = out.data() + co * len;
      const double* w = wv.data() + ci * cout * kernel + co * kernel;
      for (std::size_t j = 0; j < kernel; ++j) {
        const double wj = w[j];
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
        const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(len),
                                                           static_cast<std::ptrdiff_t>(len) - shift);
        for (std::ptrdiff_t t = t0; t < t1; ++t) orow[t + shift] += wj * xrow[t];
      }
    }
  }
  return make_result({cout, len}, std::move(out), {x, weight, bias}, [=](Node& self) {
    Node& px = parent(self, 0);
    Node& pw = parent(self, 1);
    Node& pb = parent(self, 2);
    double* gx = px.requires_grad ? px.ensure_grad().data() : nullptr;
    double* gw = pw.requires_grad ? pw.ensure_grad().data() : nullptr;
    double* gb = pb.requires_grad ? pb.ensure_grad().data() : nullptr;
    if (gb) {
      for (std::size_t co = 0; co < cout; ++co)
        for (std::size_t t = 0; t < len; ++t) gb[co] += self.grad[co * len + t];
    }
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double* xrow = px.value.data() + ci * len;
      for (std::size_t co = 0; co < cout; ++co) {
        const double* grow = self.grad.data() + co * len;
        const std::size_t woff = ci * cout * kernel + co * kernel;
        for (std::size_t j = 0; j < kernel; ++j) {
          const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
          const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
          const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(len),
                                                             static_cast<std::ptrdiff_t>(len) - shift);
          if (gw) {
            double acc = 0.0;
            for (std::ptrdiff_t t = t0; t < t1; ++t) acc += grow[t + shift] * xrow[t];
            gw[woff + j] += acc;
          }
          if (gx) {
            const double wj = pw.value[woff + j];
            double* gxrow = gx + ci * len;
            for (std::ptrdiff_t t = t0; t < t1; ++t) gxrow[t] += wj * grow[t + shift];
          }
        }
      }
    }
  });
}

Tensor dropout(const Tensor& x, double rate, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must lie in [0, 1)");
  if (rate == 0.0) return x;
  auto keep = std::make_shared<std::vector<double>>(x.size());
  std::bernoulli_distribution coin(1.0 - rate);
  const double factor = 1.0 / (1.0 - rate);
  std::vector<double> out(x.size());
  const auto in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    (*keep)[i] = coin(rng) ? factor : 0.0;
    out[i] = in[i] * (*keep)[i];
  }
  return make_result(x.shape(), std::move(out), {x}, [keep](Node& self) {
    auto& g = parent(self, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * (*keep)[i];
  });
}

}  // namespace tsaae::diff
