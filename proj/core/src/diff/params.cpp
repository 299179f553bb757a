#include "tsaae/diff/params.hpp"

#include "tsaae/error.hpp"

namespace tsaae::diff {

Tensor ParameterStore::add(const std::string& name, Shape shape, ParamKind kind, std::size_t fan_in,
                           std::size_t fan_out) {
  if (contains(name)) throw ContractError("duplicate parameter name '" + name + "'");
  Entry e;
  e.name = name;
  e.tensor = Tensor::zeros(std::move(shape), true);
  e.kind = kind;
  e.fan_in = fan_in ? fan_in : e.tensor.cols();
  e.fan_out = fan_out ? fan_out : e.tensor.rows();
  index_.emplace(name, entries_.size());
  entries_.push_back(std::move(e));
  return entries_.back().tensor;
}

void ParameterStore::adopt(const Entry& entry) {
  if (contains(entry.name)) throw ContractError("duplicate parameter name '" + entry.name + "'");
  Entry e = entry;
  e.state = {};
  index_.emplace(e.name, entries_.size());
  entries_.push_back(std::move(e));
}

const Tensor& ParameterStore::get(const std::string& name) const { return entry(name).tensor; }
Tensor& ParameterStore::get(const std::string& name) { return entry(name).tensor; }

ParameterStore::Entry& ParameterStore::entry(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter '" + name + "'");
  return entries_[it->second];
}

const ParameterStore::Entry& ParameterStore::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter '" + name + "'");
  return entries_[it->second];
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::size_t ParameterStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.size();
  return n;
}

ParameterStore ParameterStore::subset(const std::vector<std::string>& prefixes) const {
  return subset([&](const std::string& name) {
    for (const auto& p : prefixes) {
      if (name.compare(0, p.size(), p) == 0) return true;
    }
    return false;
  });
}

ParameterStore ParameterStore::subset(const std::function<bool(const std::string&)>& keep) const {
  ParameterStore out;
  for (const auto& e : entries_) {
    if (keep(e.name)) out.adopt(e);
  }
  return out;
}

void ParameterStore::zero_grad() {
  for (auto& e : entries_) e.tensor.zero_grad();
}

bool ParameterStore::any_grad() const {
  for (const auto& e : entries_) {
    if (e.tensor.has_grad()) return true;
  }
  return false;
}

}  // namespace tsaae::diff
