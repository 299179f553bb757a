#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace tsaae::cli {

std::string read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::string& bytes);

std::string sha256_hex(const std::string& bytes);

/// HTTP(S) GET into memory. Throws DataError on transport failure or a non-2xx status.
std::string download(const std::string& url);

struct ZipMember {
  std::string name;
  std::string bytes;
};

/// Stored and deflated members of a zip archive (no zip64, no encryption).
/// `keep` filters by member name before anything is inflated.
std::vector<ZipMember> read_zip(const std::string& archive, bool (*keep)(const std::string&) = nullptr);

}  // namespace tsaae::cli
