#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace sgicl {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Prompt fingerprint: the first 16 hex chars of sha256_hex.
std::string fingerprint(std::string_view bytes);

/// splitmix64 finalizer; a stable, platform-independent seed mixer.
std::uint64_t mix64(std::uint64_t x);

/// Folds `parts` into `base` with mix64 so that sub-seeds for different
/// roles (slot index, shuffle, sampling) never collide in practice.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> parts);

/// FNV-1a over the bytes, widened through mix64. Used to turn ids into seed
/// components.
std::uint64_t hash_string(std::string_view s);

}  // namespace sgicl
