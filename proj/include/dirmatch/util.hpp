#pragma once

#include <cstdint>
#include <string>

namespace dirmatch {

// FNV-1a, used for cache keys and manifest file hashes.
std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

// Writes content to path via a temporary file + rename.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace dirmatch
