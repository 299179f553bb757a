#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsaae {

// Flat `key = value` text used for run configs, checkpoint headers, reports
// and normalization sidecars. Insertion order is preserved on output; lines
// starting with '#' are comments.
class KeyValueText {
 public:
  static KeyValueText parse(std::string_view text, const std::string& origin = "<text>");
  static KeyValueText read_file(const std::filesystem::path& path);

  void set(const std::string& key, std::string value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, int value) { set(key, static_cast<std::int64_t>(value)); }
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::vector<double>& values);

  bool contains(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  // Typed getters throw ConfigError naming the key on a missing or malformed value.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  std::string to_string() const;
  void write_file(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace tsaae
