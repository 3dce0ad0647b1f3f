#include "sgicl/backend.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "sgicl/hash.hpp"

namespace sgicl {
namespace {

template <typename Fn>
auto with_retries(const Backend& backend, std::size_t retries, Fn&& fn) {
  auto delay = backend.backoff_base();
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const TransportError&) {
      if (attempt >= retries) throw;
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

}  // namespace

std::string truncate_at_stop(std::string_view text,
                             std::span<const std::string> stop_sequences) {
  std::size_t cut = text.size();
  for (const auto& stop : stop_sequences) {
    if (stop.empty()) continue;
    cut = std::min(cut, text.find(stop));
  }
  return std::string(text.substr(0, cut));
}

std::vector<double> normalize_l2(std::vector<double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (v.empty() || !(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::kUndefinedSimilarity,
                "cannot normalize a zero or non-finite vector");
  }
  for (double& x : v) x /= norm;
  return v;
}

std::string complete(Backend& backend, std::string_view prompt,
                     const SamplingConfig& sampling, std::uint64_t seed) {
  if (prompt.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "completion prompt is empty");
  }
  try {
    std::string raw = with_retries(backend, sampling.retry_limit, [&] {
      return backend.raw_complete(prompt, sampling, seed);
    });
    return truncate_at_stop(raw, sampling.stop_sequences);
  } catch (const RefusalError& e) {
    throw GenerationFailedError(fingerprint(prompt), e.what());
  }
}

std::vector<double> score_continuations(
    Backend& backend, std::string_view prompt,
    std::span<const std::string> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no candidates to score");
  }
  for (const auto& c : candidates) {
    if (c.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "empty scoring candidate");
    }
  }
  auto scores = with_retries(backend, backend.transport_retries(), [&] {
    return backend.raw_score(prompt, candidates);
  });
  if (scores.size() != candidates.size()) {
    throw Error(ErrorKind::kScoring,
                "backend returned " + std::to_string(scores.size()) +
                    " scores for " + std::to_string(candidates.size()) +
                    " candidates");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i]) || scores[i] > 0.0) {
      throw Error(ErrorKind::kScoring, "candidate '" + candidates[i] +
                                           "' got an invalid log-probability");
    }
  }
  return scores;
}

std::vector<double> embed(Backend& backend, std::string_view text) {
  if (text.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot embed empty text");
  }
  return normalize_l2(with_retries(backend, backend.transport_retries(),
                                   [&] { return backend.raw_embed(text); }));
}

void run_bounded(std::size_t count, std::size_t limit,
                 const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(limit, 1, count ? count : 1);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sgicl
