#pragma once

#include <chrono>
#include <string>

#include <nlohmann/json.hpp>

#include "sgicl/backend.hpp"

namespace sgicl {

enum class ScoringMode {
  /// Send prompt + candidate with echo and read back per-token logprobs.
  kEcho,
  /// Ask for one token with top logprobs and look the candidate up there.
  /// Only works for candidates the backend emits as a single token.
  kContinuation,
};

struct RemoteOptions {
  std::string endpoint;  // scheme://host[:port]
  std::string model;
  std::string embedding_model;  // defaults to `model` when empty
  std::string completions_path = "/v1/completions";
  std::string embeddings_path = "/v1/embeddings";
  /// Name of the environment variable holding a bearer token, if any.
  std::string auth_env;
  ScoringMode scoring = ScoringMode::kEcho;
  /// Divide a candidate's summed logprob by its token count.
  bool mean_normalize = false;
  std::size_t top_logprobs = 20;
  std::size_t max_in_flight = kDefaultInFlight;
  std::size_t transport_retries = 3;
  std::chrono::milliseconds backoff{200};
  std::chrono::seconds timeout{120};
};

/// Client for an OpenAI-style completions/embeddings HTTP service.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(RemoteOptions options);

  const std::string& id() const override { return id_; }
  std::size_t max_in_flight() const override { return o_.max_in_flight; }
  std::chrono::milliseconds backoff_base() const override { return o_.backoff; }
  std::size_t transport_retries() const override {
    return o_.transport_retries;
  }

  std::string raw_complete(std::string_view prompt,
                           const SamplingConfig& sampling,
                           std::uint64_t seed) override;
  std::vector<double> raw_score(
      std::string_view prompt,
      std::span<const std::string> candidates) override;
  std::vector<double> raw_embed(std::string_view text) override;

  const RemoteOptions& options() const noexcept { return o_; }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body,
                      bool for_generation) const;

  RemoteOptions o_;
  std::string id_;
};

// Wire-format helpers, exposed for tests.

nlohmann::json completion_request(const RemoteOptions& o,
                                  std::string_view prompt,
                                  const SamplingConfig& sampling,
                                  std::uint64_t seed);
nlohmann::json echo_scoring_request(const RemoteOptions& o,
                                    std::string_view prompt,
                                    std::string_view candidate);

/// Sums the logprobs of every echoed token that covers a byte at or after
/// `prompt_bytes`. A token straddling the boundary counts toward the
/// candidate. Returns (sum, token count).
std::pair<double, std::size_t> candidate_logprob_from_echo(
    const nlohmann::json& response, std::size_t prompt_bytes,
    std::string_view candidate);

}  // namespace sgicl
