#include "tsaae/adversarial/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tsaae/error.hpp"

namespace tsaae::adversarial {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string take(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint truncated at byte " + std::to_string(pos_));
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const Checkpoint::Blob* Checkpoint::find(const std::string& name) const {
  for (const auto& b : blobs) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

void Checkpoint::add_store(const std::string& prefix, const diff::ParameterStore& store) {
  for (const auto& e : store.entries()) {
    blobs.push_back({prefix + "/" + e.name, e.tensor.shape(), {e.tensor.values().begin(), e.tensor.values().end()}});
  }
}

void Checkpoint::restore_store(const std::string& prefix, diff::ParameterStore& store) const {
  for (auto& e : store.entries()) {
    const Blob* b = find(prefix + "/" + e.name);
    if (!b) throw CompatibilityError("checkpoint lacks parameter " + prefix + "/" + e.name);
    if (b->shape != e.tensor.shape()) {
      throw CompatibilityError("checkpoint parameter " + b->name + " has shape " + diff::shape_string(b->shape) +
                               ", model expects " + diff::shape_string(e.tensor.shape()));
    }
    std::copy(b->values.begin(), b->values.end(), e.tensor.mutable_values().begin());
  }
}

void Checkpoint::add_optimizer_state(const std::string& group, const diff::ParameterStore& store) {
  header.set("opt." + group + ".steps", static_cast<std::uint64_t>(store.step_count()));
  for (const auto& e : store.entries()) {
    const std::string base = "opt/" + group + "/" + e.name;
    if (!e.state.first.empty()) blobs.push_back({base + "/m", {e.state.first.size()}, e.state.first});
    if (!e.state.second.empty()) blobs.push_back({base + "/v", {e.state.second.size()}, e.state.second});
  }
}

void Checkpoint::restore_optimizer_state(const std::string& group, diff::ParameterStore& store) const {
  if (const auto steps = header.find("opt." + group + ".steps")) {
    store.set_step_count(static_cast<std::uint64_t>(header.get_int("opt." + group + ".steps")));
  }
  for (auto& e : store.entries()) {
    const std::string base = "opt/" + group + "/" + e.name;
    e.state = {};
    if (const Blob* m = find(base + "/m")) e.state.first = m->values;
    if (const Blob* v = find(base + "/v")) e.state.second = v->values;
    for (const auto* buf : {&e.state.first, &e.state.second}) {
      if (!buf->empty() && buf->size() != e.tensor.size()) {
        throw CompatibilityError("optimizer state for " + base + " does not match the parameter size");
      }
    }
  }
}

std::string Checkpoint::serialize() const {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
  put<std::uint32_t>(out, format_version);
  const std::string text = header.to_string();
  put<std::uint64_t>(out, text.size());
  out += text;
  put<std::uint64_t>(out, blobs.size());
  for (const auto& b : blobs) {
    if (b.values.size() != diff::shape_size(b.shape)) throw ContractError("checkpoint blob " + b.name + " has inconsistent shape");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.name.size()));
    out += b.name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.shape.size()));
    for (auto d : b.shape) put<std::uint64_t>(out, d);
    put<std::uint64_t>(out, b.values.size() * sizeof(double));
    for (double v : b.values) put<double>(out, v);
  }
  return out;
}

Checkpoint Checkpoint::deserialize(const std::string& bytes) {
  Reader in(bytes);
  const std::size_t magic_len = sizeof(kCheckpointMagic) - 1;
  if (bytes.size() < magic_len || bytes.compare(0, magic_len, kCheckpointMagic) != 0) {
    throw CompatibilityError("not a checkpoint (bad magic)");
  }
  in.take(magic_len);
  Checkpoint cp;
  cp.format_version = in.get<std::uint32_t>();
  if (cp.format_version != kCheckpointVersion) {
    throw CompatibilityError("checkpoint format version " + std::to_string(cp.format_version) + " is not supported (expected " +
                             std::to_string(kCheckpointVersion) + ")");
  }
  const auto header_len = in.get<std::uint64_t>();
  cp.header = KeyValueText::parse(in.take(header_len), "<checkpoint header>");
  const auto count = in.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    Blob b;
    b.name = in.take(in.get<std::uint32_t>());
    const auto rank = in.get<std::uint32_t>();
    for (std::uint32_t r = 0; r < rank; ++r) b.shape.push_back(static_cast<std::size_t>(in.get<std::uint64_t>()));
    const auto byte_len = in.get<std::uint64_t>();
    if (byte_len != diff::shape_size(b.shape) * sizeof(double)) {
      throw DataError("checkpoint blob " + b.name + " length does not match its shape");
    }
    b.values.resize(byte_len / sizeof(double));
    for (auto& v : b.values) v = in.get<double>();
    cp.blobs.push_back(std::move(b));
  }
  if (!in.done()) throw DataError("checkpoint has trailing bytes");
  return cp;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint " + tmp);
    const auto bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("checkpoint write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace tsaae::adversarial
