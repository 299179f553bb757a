#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tsaae/diff/params.hpp"
#include "tsaae/keyvalue.hpp"

namespace tsaae::adversarial {

inline constexpr char kCheckpointMagic[] = "TSADVAE";
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary container, all integers and floats little-endian:
//
//   magic        7 bytes  "TSADVAE"
//   version      u32
//   header_len   u64, then header_len bytes of `key = value` text (configs,
//                model kind, epoch, RNG state, normalization stats, step counts)
//   blob_count   u64
//   per blob:    name_len u32, name bytes, rank u32, dims u64[rank],
//                byte_len u64 (= 8 * prod(dims)), f64 values
//
// Blobs are keyed "model/<param>", "disc/<param>" and
// "opt/<group>/<param>/{m,v}" for optimizer moments.
struct Checkpoint {
  struct Blob {
    std::string name;
    diff::Shape shape;
    std::vector<double> values;

    friend bool operator==(const Blob&, const Blob&) = default;
  };

  std::uint32_t format_version = kCheckpointVersion;
  KeyValueText header;
  std::vector<Blob> blobs;

  const Blob* find(const std::string& name) const;
  void add_store(const std::string& prefix, const diff::ParameterStore& store);
  /// Copies blob values into every parameter of `store` (CompatibilityError on mismatch).
  void restore_store(const std::string& prefix, diff::ParameterStore& store) const;
  void add_optimizer_state(const std::string& group, const diff::ParameterStore& store);
  void restore_optimizer_state(const std::string& group, diff::ParameterStore& store) const;

  std::string serialize() const;
  /// Throws CompatibilityError on bad magic or unsupported version, DataError on truncation.
  static Checkpoint deserialize(const std::string& bytes);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace tsaae::adversarial
