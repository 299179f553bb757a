#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tsaae::diff {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad, accumulates into parents' grads.
  std::function<void(Node&)> backward;

  std::vector<double>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

// Handle to a dense 64-bit tensor with an optional gradient slot. Copies share
// the underlying storage; tensors produced by ops keep their inputs alive until
// the result is released.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false) {
    return from({rows, cols}, std::move(values), requires_grad);
  }

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  // Matrix view: the last axis is the column axis, everything before it folds into rows.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  double item() const;
  double at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }
  double operator[](std::size_t i) const { return node_->value[i]; }

  bool requires_grad() const { return node_ && node_->requires_grad; }
  void set_requires_grad(bool on);

  bool has_grad() const { return node_ && !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  /// Allocates a zero-filled gradient buffer on first use.
  std::span<double> mutable_grad() { return node_->ensure_grad(); }
  /// Releases the gradient buffer; has_grad() is false afterwards.
  void zero_grad();

  /// Same values, no history, no gradient requirement.
  Tensor detach() const;
  /// Independent deep copy of the values.
  Tensor clone() const;

  bool is_leaf() const { return node_ && node_->parents.empty(); }
  const std::shared_ptr<detail::Node>& node() const { return node_; }

  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

/// True while gradient recording is enabled on this thread.
bool grad_enabled();

// Disables graph recording for its lifetime (values only, no parents kept).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Builds a recorded op from precomputed values. `backward` receives the output
// node (with its grad filled) and must accumulate into the parents that require
// grad. Exposed so models and tests can add ops without touching the core.
Tensor make_result(Shape shape, std::vector<double> value, std::vector<Tensor> parents,
                   std::function<void(detail::Node&)> backward);

/// Reverse-mode sweep from a scalar loss. Leaf gradients accumulate across calls.
void backward(const Tensor& loss);

}  // namespace tsaae::diff
