#include "fetch.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "tsaae/error.hpp"

namespace tsaae::cli {
namespace {

std::uint32_t le32(const std::string& b, std::size_t at) {
  if (at + 4 > b.size()) throw DataError("zip: truncated archive");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + static_cast<std::size_t>(i)]);
  return v;
}

std::uint16_t le16(const std::string& b, std::size_t at) {
  if (at + 2 > b.size()) throw DataError("zip: truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) | (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::string inflate_raw(const std::string& data, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw DataError("zip: inflate init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) throw DataError("zip: corrupt deflate stream");
  return out;
}

std::size_t collect(char* ptr, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(ptr, size * n);
  return size * n;
}

}  // namespace

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string download(const std::string& url) {
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
  if (!curl) throw DataError("download: curl init failed");
  std::string body;
  char err[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, collect);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &body);
  curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, err);
  curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 30L);
  const CURLcode rc = curl_easy_perform(curl.get());
  if (rc != CURLE_OK) throw DataError("download of " + url + " failed: " + (err[0] ? err : curl_easy_strerror(rc)));
  long status = 0;
  curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &status);
  if (status < 200 || status >= 300) throw DataError("download of " + url + " returned HTTP " + std::to_string(status));
  return body;
}

std::vector<ZipMember> read_zip(const std::string& archive, bool (*keep)(const std::string&)) {
  constexpr std::uint32_t kEnd = 0x06054b50, kCentral = 0x02014b50, kLocal = 0x04034b50;
  if (archive.size() < 22) throw DataError("zip: archive too small");
  std::size_t end = std::string::npos;
  const std::size_t lowest = archive.size() > 22 + 65535 ? archive.size() - 22 - 65535 : 0;
  for (std::size_t at = archive.size() - 22 + 1; at-- > lowest;) {
    if (le32(archive, at) == kEnd) {
      end = at;
      break;
    }
  }
  if (end == std::string::npos) throw DataError("zip: end of central directory not found");
  const std::size_t entries = le16(archive, end + 10);
  std::size_t at = le32(archive, end + 16);
  std::vector<ZipMember> out;
  for (std::size_t e = 0; e < entries; ++e) {
    if (le32(archive, at) != kCentral) throw DataError("zip: bad central directory entry");
    const std::uint16_t method = le16(archive, at + 10);
    const std::uint32_t packed = le32(archive, at + 20);
    const std::uint32_t size = le32(archive, at + 24);
    const std::uint16_t name_len = le16(archive, at + 28);
    const std::uint16_t extra_len = le16(archive, at + 30);
    const std::uint16_t comment_len = le16(archive, at + 32);
    const std::uint32_t local = le32(archive, at + 42);
    if (at + 46 + name_len > archive.size()) throw DataError("zip: truncated archive");
    std::string name = archive.substr(at + 46, name_len);
    at += 46 + name_len + extra_len + comment_len;
    if (!name.empty() && name.back() == '/') continue;
    if (keep && !keep(name)) continue;
    if (le32(archive, local) != kLocal) throw DataError("zip: bad local header for " + name);
    const std::size_t data_at = local + 30 + le16(archive, local + 26) + le16(archive, local + 28);
    if (data_at + packed > archive.size()) throw DataError("zip: truncated member " + name);
    const std::string data = archive.substr(data_at, packed);
    if (method == 0) {
      out.push_back({name, data});
    } else if (method == 8) {
      out.push_back({name, inflate_raw(data, size)});
    } else {
      throw DataError("zip: member " + name + " uses unsupported compression method " + std::to_string(method));
    }
  }
  return out;
}

}  // namespace tsaae::cli
