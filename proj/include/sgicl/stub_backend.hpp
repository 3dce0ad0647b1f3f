#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sgicl/backend.hpp"

namespace sgicl {

/// Scripted responses for the stub backend. Rules are keyed by prompt
/// fingerprint (see fingerprint()).
///
/// Text format, one record per line, `#` starts a comment:
///
///   id "stub-fixture"
///   default_score -10.5            (or: default_score synthetic)
///   completions synthetic          (or: completions none)
///   embedding_dim 16
///   complete <fp> <seed|*> "<json string>"
///   score <fp> "<json string candidate>" <logprob>
///   embed <fp> <x1> <x2> ...
///   refuse <fp> <seed|*>
///   transport_fail <fp> <count>
///
/// Without a matching rule the stub falls back to the defaults: synthetic
/// values are pure functions of the request bytes and seed.
struct StubScript {
  using SeedKey = std::optional<std::uint64_t>;  // nullopt matches any seed

  std::string id = "stub";
  std::map<std::pair<std::string, SeedKey>, std::string> completions;
  std::set<std::pair<std::string, SeedKey>> refusals;
  std::map<std::pair<std::string, std::string>, double> scores;
  std::map<std::string, std::vector<double>> embeddings;
  std::map<std::string, std::size_t> transport_failures;
  std::optional<double> default_score;  // nullopt: synthetic
  bool synthetic_completions = true;
  std::size_t embedding_dim = 16;

  void add_completion(std::string_view prompt, SeedKey seed, std::string text);
  void add_refusal(std::string_view prompt, SeedKey seed);
  /// Throws kConfiguration if logprob > 0 or is not finite.
  void add_score(std::string_view prompt, std::string candidate,
                 double logprob);
  void add_embedding(std::string_view text, std::vector<double> vector);

  static StubScript parse(std::string_view text);
  static StubScript load(const std::filesystem::path& path);
  std::string serialize() const;
};

class StubBackend final : public Backend {
 public:
  explicit StubBackend(StubScript script);

  const std::string& id() const override { return script_.id; }
  std::chrono::milliseconds backoff_base() const override {
    return std::chrono::milliseconds(0);
  }

  std::string raw_complete(std::string_view prompt,
                           const SamplingConfig& sampling,
                           std::uint64_t seed) override;
  std::vector<double> raw_score(
      std::string_view prompt,
      std::span<const std::string> candidates) override;
  std::vector<double> raw_embed(std::string_view text) override;

  const StubScript& script() const noexcept { return script_; }

  // Request counters (one per raw call, retries included).
  std::size_t completion_calls() const noexcept { return completion_calls_; }
  std::size_t score_calls() const noexcept { return score_calls_; }
  std::size_t embed_calls() const noexcept { return embed_calls_; }
  void reset_counters() noexcept;

 private:
  StubScript script_;
  std::atomic<std::size_t> completion_calls_{0};
  std::atomic<std::size_t> score_calls_{0};
  std::atomic<std::size_t> embed_calls_{0};
  std::mutex failures_mu_;
  std::map<std::string, std::size_t> failures_left_;
};

}  // namespace sgicl
