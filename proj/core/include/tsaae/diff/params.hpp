#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsaae/diff/tensor.hpp"

namespace tsaae::diff {

enum class ParamKind {
  weight,  // initialized by the chosen scheme
  bias,    // zero
  gain,    // one (layer-norm scale)
};

// Per-parameter optimizer buffers (Adam moments or RMSprop mean square).
struct MomentBuffers {
  std::vector<double> first;
  std::vector<double> second;
};

// Ordered, uniquely named collection of trainable tensors plus the optimizer
// state that belongs to it. Subsets share tensors with their parent store but
// own fresh optimizer state, so several optimizers can drive overlapping groups.
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    Tensor tensor;
    ParamKind kind = ParamKind::weight;
    std::size_t fan_in = 0;
    std::size_t fan_out = 0;
    MomentBuffers state;
  };

  /// Registers a zero-filled parameter. Fans default to (cols, rows) of the matrix view.
  Tensor add(const std::string& name, Shape shape, ParamKind kind = ParamKind::weight, std::size_t fan_in = 0,
             std::size_t fan_out = 0);
  /// Registers an existing tensor (shared, not copied).
  void adopt(const Entry& entry);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;

  std::vector<Entry>& entries() noexcept { return entries_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<std::string> names() const;

  /// Total number of scalar parameters.
  std::size_t parameter_count() const;

  /// New store sharing every tensor whose name starts with one of `prefixes`.
  ParameterStore subset(const std::vector<std::string>& prefixes) const;
  ParameterStore subset(const std::function<bool(const std::string&)>& keep) const;

  void zero_grad();
  bool any_grad() const;

  /// Optimizer step counter (Adam bias correction).
  std::uint64_t step_count() const noexcept { return steps_; }
  void set_step_count(std::uint64_t steps) noexcept { steps_ = steps; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t steps_ = 0;
};

}  // namespace tsaae::diff
