#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgicl/core.hpp"
#include "sgicl/error.hpp"

namespace sgicl {

inline constexpr std::size_t kDefaultInFlight = 8;

/// Thrown by a backend that answered but declined to generate.
class RefusalError : public Error {
 public:
  explicit RefusalError(const std::string& message)
      : Error(ErrorKind::kGenerationFailed, message) {}
};

/// A language-model + embedding service. Implementations supply the raw
/// hooks; callers go through complete(), score_continuations() and embed(),
/// which enforce the output contracts and retry transport failures.
///
/// Implementations must be safe to call from several threads at once.
class Backend {
 public:
  virtual ~Backend() = default;

  /// Participates in cache keys; must identify the (endpoint, model) pair.
  virtual const std::string& id() const = 0;
  virtual std::size_t max_in_flight() const { return kDefaultInFlight; }
  /// First retry delay; doubles on each further attempt.
  virtual std::chrono::milliseconds backoff_base() const {
    return std::chrono::milliseconds(100);
  }
  /// Retry budget for scoring and embedding requests.
  virtual std::size_t transport_retries() const { return 3; }

  virtual std::string raw_complete(std::string_view prompt,
                                   const SamplingConfig& sampling,
                                   std::uint64_t seed) = 0;
  virtual std::vector<double> raw_score(
      std::string_view prompt, std::span<const std::string> candidates) = 0;
  virtual std::vector<double> raw_embed(std::string_view text) = 0;
};

/// Cuts `text` at the earliest occurrence of any stop sequence.
std::string truncate_at_stop(std::string_view text,
                             std::span<const std::string> stop_sequences);

/// Scales `v` to unit L2 norm. Throws kUndefinedSimilarity for a zero or
/// non-finite vector.
std::vector<double> normalize_l2(std::vector<double> v);

/// Completion truncated at the first stop sequence. Transport errors are
/// retried up to sampling.retry_limit times with exponential backoff; a
/// refusal becomes GenerationFailedError carrying the prompt fingerprint.
/// An empty completion is returned as-is.
std::string complete(Backend& backend, std::string_view prompt,
                     const SamplingConfig& sampling, std::uint64_t seed);

/// One finite log-probability (<= 0) per candidate, order-aligned.
std::vector<double> score_continuations(Backend& backend,
                                        std::string_view prompt,
                                        std::span<const std::string> candidates);

/// Unit-norm embedding of `text`.
std::vector<double> embed(Backend& backend, std::string_view text);

/// Runs task(i) for every i in [0, count) on at most `limit` threads. All
/// tasks run even if some throw; afterwards the exception of the lowest
/// failing index is rethrown so failures are order-deterministic.
void run_bounded(std::size_t count, std::size_t limit,
                 const std::function<void(std::size_t)>& task);

}  // namespace sgicl
