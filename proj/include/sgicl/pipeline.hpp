#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgicl/backend.hpp"
#include "sgicl/cache.hpp"
#include "sgicl/core.hpp"
#include "sgicl/templating.hpp"

namespace sgicl {

/// Balanced class schedule for k generation slots: round-robin over
/// `num_classes` starting at a seed-derived class. Output order is the
/// generation order.
std::vector<ClassId> assign_classes(std::size_t k, std::size_t num_classes,
                                    std::uint64_t seed);

/// Seed for generation slot `slot` of `example_id` under run seed `seed`.
/// Retry r of the slot uses slot_seed(...) + r.
std::uint64_t slot_seed(std::uint64_t seed, std::string_view example_id,
                        std::size_t slot);

/// Seed fed to assign_classes for one example.
std::uint64_t assignment_seed(std::uint64_t seed, std::string_view example_id);

struct DemonstrationSet {
  std::string source_example_id;
  Method method = Method::kSgIcl;
  std::uint64_t seed = 0;
  std::vector<Demonstration> demos;
  std::vector<std::string> warnings;
};

/// Gold training examples. Every call to examples() is counted so callers can
/// prove a code path never read the training split.
class TrainingPool {
 public:
  explicit TrainingPool(std::vector<Example> examples);

  std::span<const Example> examples() const;
  std::size_t access_count() const noexcept { return accesses_; }

 private:
  std::vector<Example> examples_;
  mutable std::atomic<std::size_t> accesses_{0};
};

/// Self-generation step for one test input. Slots whose generation stays
/// empty after sampling.retry_limit retries are dropped with a warning; more
/// than k/2 drops raise kDegenerateGeneration. Uses `cache` when given.
DemonstrationSet self_generate(const TaskSpec& task, const Example& example,
                               const RunConfig& config, Backend& backend,
                               std::uint64_t seed,
                               GenerationCache* cache = nullptr);

struct ScoredPrompt {
  std::string prompt;
  Prediction prediction;
};

/// Scores every verbalizer word after the assembled prompt and returns the
/// argmax class (ties to the lowest ClassId).
ScoredPrompt score_prompt(const TaskSpec& task,
                          std::span<const Demonstration> demos,
                          const Example& test, TemplateVariant variant,
                          Backend& backend);

Prediction predict(const TaskSpec& task, std::span<const Demonstration> demos,
                   const Example& test, TemplateVariant variant,
                   Backend& backend);

struct ExampleResult {
  std::string example_id;
  std::optional<ClassId> gold;
  ScoredPrompt scored;
  /// Demonstrations in prompt order; absent for zero-shot.
  std::optional<DemonstrationSet> demos;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<ExampleResult> results;  // dataset order
};

struct MethodRun {
  std::string task;
  Method method = Method::kZeroShot;
  std::size_t k = 0;
  TemplateVariant variant = TemplateVariant::kManual;
  std::vector<SeedRun> seeds;  // config.seeds order
  std::vector<std::string> warnings;
};

/// Runs one method over `dataset` for every seed in `config`. Few-shot
/// draws k gold pairs per seed (uniform, without replacement) from `pool`;
/// SG-ICL never touches `pool`. Examples run concurrently, bounded by
/// backend.max_in_flight(); results are ordered by seed then example.
MethodRun run_method(const TaskSpec& task, std::span<const Example> dataset,
                     const RunConfig& config, Backend& backend,
                     GenerationCache* cache = nullptr,
                     const TrainingPool* pool = nullptr);

/// Gold indices drawn for a few-shot seed: k distinct indices in [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t k,
                                                    std::uint64_t seed);

}  // namespace sgicl
