#pragma once

#include <filesystem>
#include <string>

namespace simta {

/// Whole-file read; IoError on failure.
std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file + rename so readers never observe a
/// partially written artifact.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// FNV-1a 64-bit digest as fixed-width hex; used for input digests in run
/// manifests.
std::string fnv1a_hex(const std::string& bytes);
std::string file_digest(const std::filesystem::path& path);

}  // namespace simta
