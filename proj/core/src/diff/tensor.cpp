#include "tsaae/diff/tensor.hpp"

#include <numeric>
#include <unordered_set>

#include "tsaae/error.hpp"

namespace tsaae::diff {
namespace {

thread_local bool g_grad_enabled = true;

// Releasing a long op chain through nested shared_ptr destructors recurses once
// per node; parents are handed to this list and dropped iteratively instead.
thread_local std::vector<std::shared_ptr<detail::Node>> g_release_queue;
thread_local bool g_releasing = false;

}  // namespace

namespace detail {

// Out-of-line so the iterative release applies to every node.
struct NodeReleaser {
  static void release(Node& node) {
    for (auto& p : node.parents) {
      if (p) g_release_queue.push_back(std::move(p));
    }
    node.parents.clear();
    if (g_releasing) return;
    g_releasing = true;
    while (!g_release_queue.empty()) {
      auto p = std::move(g_release_queue.back());
      g_release_queue.pop_back();
      if (p.use_count() == 1) {
        for (auto& q : p->parents) {
          if (q) g_release_queue.push_back(std::move(q));
        }
        p->parents.clear();
      }
    }
    g_releasing = false;
  }
};

}  // namespace detail

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

std::shared_ptr<detail::Node> new_node(Shape shape, std::vector<double> values, bool requires_grad) {
  if (values.size() != shape_size(shape)) {
    throw ShapeError("tensor buffer of " + std::to_string(values.size()) + " values does not match shape " +
                     shape_string(shape));
  }
  auto node = std::shared_ptr<detail::Node>(new detail::Node, [](detail::Node* n) {
    detail::NodeReleaser::release(*n);
    delete n;
  });
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return node;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = shape_size(shape);
  return Tensor(new_node(std::move(shape), std::vector<double>(n, value), requires_grad));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  return Tensor(new_node(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({}, {value}, requires_grad); }

std::size_t Tensor::rows() const {
  const auto& s = node_->shape;
  if (s.empty()) return 1;
  return s.back() == 0 ? 0 : node_->value.size() / s.back();
}

std::size_t Tensor::cols() const {
  const auto& s = node_->shape;
  return s.empty() ? 1 : s.back();
}

double Tensor::item() const {
  if (node_->value.size() != 1) {
    throw ContractError("item() on tensor of shape " + shape_string(node_->shape));
  }
  return node_->value[0];
}

void Tensor::set_requires_grad(bool on) { node_->requires_grad = on; }

void Tensor::zero_grad() {
  if (node_) {
    node_->grad.clear();
    node_->grad.shrink_to_fit();
  }
}

Tensor Tensor::detach() const { return Tensor(new_node(node_->shape, node_->value, false)); }

Tensor Tensor::clone() const { return Tensor(new_node(node_->shape, node_->value, node_->requires_grad)); }

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Tensor make_result(Shape shape, std::vector<double> value, std::vector<Tensor> parents,
                   std::function<void(detail::Node&)> backward_fn) {
  bool needs = false;
  if (g_grad_enabled) {
    for (const auto& p : parents) needs = needs || p.requires_grad();
  }
  auto node = new_node(std::move(shape), std::move(value), needs);
  if (needs) {
    node->parents.reserve(parents.size());
    for (const auto& p : parents) node->parents.push_back(p.node());
    node->backward = std::move(backward_fn);
  }
  return Tensor(std::move(node));
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ContractError("backward() requires a scalar loss, got shape " +
                        (loss.defined() ? shape_string(loss.shape()) : std::string("<undefined>")));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order (parents before children).
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior gradients are per-sweep; leaves accumulate.
  for (auto* node : order) {
    if (!node->parents.empty()) node->grad.assign(node->value.size(), 0.0);
  }
  loss.node()->ensure_grad()[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (node->parents.empty() || !node->backward) continue;
    node->backward(*node);
  }
  for (auto* node : order) {
    if (!node->parents.empty() && node != loss.node().get()) {
      node->grad.clear();
      node->grad.shrink_to_fit();
    }
  }
}

}  // namespace tsaae::diff
