#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sgicl {

enum class ErrorKind {
  kNotFound,
  kInvalidArgument,
  kInvalidClass,
  kTemplateResolution,
  kTransport,
  kGenerationFailed,
  kDegenerateGeneration,
  kScoring,
  kUndefinedSimilarity,
  kInput,
  kSchema,
  kRow,
  kRowCount,
  kCacheIntegrity,
  kConfiguration,
};

/// Stable, machine-parsable name ("not-found", "scoring", ...).
std::string_view kind_name(ErrorKind kind);

/// Errors that stem from how the tool was set up rather than from running it.
bool is_configuration_kind(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Retryable: the request never produced a usable response.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error(ErrorKind::kTransport, message) {}
};

class GenerationFailedError : public Error {
 public:
  GenerationFailedError(std::string fingerprint, const std::string& message)
      : Error(ErrorKind::kGenerationFailed, message),
        fingerprint_(std::move(fingerprint)) {}

  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::string fingerprint_;
};

/// A dataset row that cannot be turned into an Example. Line numbers are
/// physical, 1-based file lines.
class RowError : public Error {
 public:
  RowError(ErrorKind kind, std::size_t line, const std::string& message)
      : Error(kind, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sgicl
