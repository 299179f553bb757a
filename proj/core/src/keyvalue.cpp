#include "tsaae/keyvalue.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tsaae/error.hpp"

namespace tsaae {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (text == "nan" || text == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf" || text == "+inf" || text == "Infinity") return std::numeric_limits<double>::infinity();
  if (text == "-inf" || text == "-Infinity") return -std::numeric_limits<double>::infinity();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw DataError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

KeyValueText KeyValueText::parse(std::string_view text, const std::string& origin) {
  KeyValueText kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(origin, line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(origin, line_no, "empty key");
    kv.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValueText KeyValueText::read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValueText::set(const std::string& key, std::string value) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
  if (it != entries_.end()) {
    it->second = std::move(value);
  } else {
    entries_.emplace_back(key, std::move(value));
  }
}

void KeyValueText::set(const std::string& key, double value) { set(key, format_double(value)); }
void KeyValueText::set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
void KeyValueText::set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
void KeyValueText::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

void KeyValueText::set(const std::string& key, const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ',';
    joined += format_double(values[i]);
  }
  set(key, std::move(joined));
}

bool KeyValueText::contains(const std::string& key) const { return find(key).has_value(); }

std::optional<std::string> KeyValueText::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KeyValueText::get_string(const std::string& key) const {
  auto v = find(key);
  if (!v) throw ConfigError("missing key '" + key + "'");
  return *v;
}

double KeyValueText::get_double(const std::string& key) const {
  const auto v = get_string(key);
  try {
    return parse_double(v);
  } catch (const DataError&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::int64_t KeyValueText::get_int(const std::string& key) const {
  const auto v = get_string(key);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool KeyValueText::get_bool(const std::string& key) const {
  const auto v = get_string(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValueText::get_doubles(const std::string& key) const {
  const auto v = get_string(key);
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::string_view rest = v;
  while (true) {
    const auto comma = rest.find(',');
    try {
      out.push_back(parse_double(rest.substr(0, comma)));
    } catch (const DataError&) {
      throw ConfigError("key '" + key + "': malformed number list '" + v + "'");
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::string KeyValueText::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

void KeyValueText::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_string();
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace tsaae
