#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>

#include "sgicl/core.hpp"

namespace sgicl {

/// Everything a generated demonstration depends on.
struct CacheKey {
  std::string task;
  std::string example_id;
  ClassId target_class = 0;
  ConditioningMode mode = ConditioningMode::kInputAndClass;
  double temperature = 0.5;
  std::uint64_t seed = 0;
  std::string template_hash;
  std::string backend_id;

  /// Canonical text form; equal keys give equal bytes.
  std::string canonical() const;
  /// SHA-256 hex of canonical(); names the record file.
  std::string digest() const;
};

/// Append-only directory of one JSON record per entry:
///
///   <dir>/<digest[0:2]>/<digest>.json
///
/// Puts write a temp file in the same directory and rename it into place,
/// so concurrent readers see either nothing or a complete record. Records
/// that fail to parse, or whose stored key or checksum disagree, are moved
/// to <dir>/quarantine/ and reported as kCacheIntegrity.
class GenerationCache {
 public:
  explicit GenerationCache(std::filesystem::path dir);

  std::optional<GeneratedDemonstration> get(const CacheKey& key) const;
  void put(const CacheKey& key, const GeneratedDemonstration& value);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path record_path(const CacheKey& key) const;

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }
  std::size_t puts() const noexcept { return puts_; }

 private:
  void quarantine(const std::filesystem::path& path) const;

  std::filesystem::path dir_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
  std::atomic<std::size_t> puts_{0};
};

}  // namespace sgicl
