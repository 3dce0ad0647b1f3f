#include "sgicl/pipeline.hpp"

#include <algorithm>

#include "sgicl/error.hpp"
#include "sgicl/hash.hpp"

namespace sgicl {
namespace {

// Seed roles; folded in with derive_seed so streams never overlap.
constexpr std::uint64_t kRoleAssign = 1;
constexpr std::uint64_t kRoleSlot = 2;
constexpr std::uint64_t kRoleShuffle = 3;
constexpr std::uint64_t kRoleFewShot = 4;

std::string trim(std::string_view s) {
  constexpr std::string_view kWs = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(kWs);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kWs);
  return std::string(s.substr(b, e - b + 1));
}

// Fisher-Yates driven by mix64 so the permutation is identical on every
// platform (std::shuffle is not).
template <typename T>
void portable_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::uint64_t state = seed;
  for (std::size_t i = items.size(); i > 1; --i) {
    state = mix64(state);
    std::swap(items[i - 1], items[state % i]);
  }
}

void validate_dataset(const TaskSpec& task, std::span<const Example> dataset) {
  for (const auto& ex : dataset) validate_example(task, ex);
}

}  // namespace

std::vector<ClassId> assign_classes(std::size_t k, std::size_t num_classes,
                                    std::uint64_t seed) {
  if (num_classes < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "class assignment needs at least two classes");
  }
  const std::size_t offset = mix64(seed) % num_classes;
  std::vector<ClassId> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = (offset + i) % num_classes;
  return out;
}

std::uint64_t slot_seed(std::uint64_t seed, std::string_view example_id,
                        std::size_t slot) {
  return derive_seed(seed, {kRoleSlot, hash_string(example_id), slot});
}

std::uint64_t assignment_seed(std::uint64_t seed,
                              std::string_view example_id) {
  return derive_seed(seed, {kRoleAssign, hash_string(example_id)});
}

std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t k,
                                                    std::uint64_t seed) {
  if (k > n) {
    throw Error(ErrorKind::kConfiguration,
                "cannot draw " + std::to_string(k) + " distinct items from " +
                    std::to_string(n));
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  // Partial Fisher-Yates: the first k positions end up a uniform sample.
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < k; ++i) {
    state = mix64(state);
    std::swap(idx[i], idx[i + state % (n - i)]);
  }
  idx.resize(k);
  return idx;
}

TrainingPool::TrainingPool(std::vector<Example> examples)
    : examples_(std::move(examples)) {}

std::span<const Example> TrainingPool::examples() const {
  ++accesses_;
  return examples_;
}

DemonstrationSet self_generate(const TaskSpec& task, const Example& example,
                               const RunConfig& config, Backend& backend,
                               std::uint64_t seed, GenerationCache* cache) {
  if (config.method() != Method::kSgIcl) {
    throw Error(ErrorKind::kConfiguration,
                "self-generation requires method sg-icl");
  }
  validate_example(task, example);
  const auto& sampling = config.sampling();
  const auto& gen = task.generation_template();
  const bool pair = task.arity() == Arity::kSentencePair;
  const auto schedule = assign_classes(config.k(), task.num_classes(),
                                       assignment_seed(seed, example.id));

  DemonstrationSet set{example.id, Method::kSgIcl, seed, {}, {}};
  std::size_t dropped = 0;
  for (std::size_t slot = 0; slot < schedule.size(); ++slot) {
    const ClassId target = schedule[slot];
    const std::uint64_t base = slot_seed(seed, example.id, slot);
    const CacheKey key{task.name(),          example.id,
                       target,               config.conditioning(),
                       sampling.temperature, base,
                       gen.hash(),           backend.id()};
    if (cache) {
      try {
        if (auto hit = cache->get(key)) {
          set.demos.push_back({std::move(*hit), target});
          continue;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kCacheIntegrity) throw;
        set.warnings.push_back(std::string(e.what()) + "; regenerating");
      }
    }

    const std::string prompt =
        render_generation_prompt(task, example, target, config.conditioning());
    std::optional<GeneratedDemonstration> demo;
    for (std::size_t attempt = 0; attempt <= sampling.retry_limit; ++attempt) {
      const std::uint64_t sub = base + attempt;
      std::string text;
      try {
        text = trim(complete(backend, prompt, sampling, sub));
      } catch (const GenerationFailedError&) {
        continue;
      }
      if (text.empty()) continue;
      GeneratedDemonstration candidate{
          example.id,
          target,
          std::move(text),
          pair ? std::optional<std::string>(example.text1) : std::nullopt,
          config.conditioning(),
          {backend.id(), sub, gen.hash()}};
      validate_demonstration(task, candidate, sampling.stop_sequences);
      demo = std::move(candidate);
      break;
    }
    if (!demo) {
      ++dropped;
      set.warnings.push_back(
          "example " + example.id + " slot " + std::to_string(slot) + " (\"" +
          task.verbalizer(target) + "\"): generation failed after " +
          std::to_string(sampling.retry_limit + 1) + " attempts [prompt " +
          fingerprint(prompt) + "]");
      continue;
    }
    if (cache) cache->put(key, *demo);
    set.demos.push_back({std::move(*demo), target});
  }
  if (dropped * 2 > schedule.size()) {
    throw Error(ErrorKind::kDegenerateGeneration,
                "example " + example.id + ": " + std::to_string(dropped) +
                    " of " + std::to_string(schedule.size()) +
                    " generation slots failed");
  }
  return set;
}

ScoredPrompt score_prompt(const TaskSpec& task,
                          std::span<const Demonstration> demos,
                          const Example& test, TemplateVariant variant,
                          Backend& backend) {
  ScoredPrompt out;
  out.prompt = render_inference_prompt(task, demos, test, variant);
  const auto words = task.verbalizer_words();
  out.prediction =
      Prediction::from_scores(score_continuations(backend, out.prompt, words));
  return out;
}

Prediction predict(const TaskSpec& task, std::span<const Demonstration> demos,
                   const Example& test, TemplateVariant variant,
                   Backend& backend) {
  return score_prompt(task, demos, test, variant, backend).prediction;
}

MethodRun run_method(const TaskSpec& task, std::span<const Example> dataset,
                     const RunConfig& config, Backend& backend,
                     GenerationCache* cache, const TrainingPool* pool) {
  validate_dataset(task, dataset);
  MethodRun run{task.name(), config.method(), config.k(), config.variant(),
                {}, {}};
  const std::size_t n = dataset.size();
  const std::size_t limit = backend.max_in_flight();
  const auto variant = config.variant();

  switch (config.method()) {
    case Method::kZeroShot: {
      std::vector<ExampleResult> results(n);
      run_bounded(n, limit, [&](std::size_t i) {
        const auto& ex = dataset[i];
        results[i] = {ex.id, ex.gold, score_prompt(task, {}, ex, variant, backend),
                      std::nullopt};
      });
      for (auto seed : config.seeds()) run.seeds.push_back({seed, results});
      break;
    }
    case Method::kFewShot: {
      if (!pool) {
        throw Error(ErrorKind::kConfiguration,
                    "few-shot requires a gold training pool");
      }
      const auto train = pool->examples();
      if (train.empty()) {
        throw Error(ErrorKind::kConfiguration, "training pool is empty");
      }
      for (const auto& ex : train) {
        validate_example(task, ex);
        if (!ex.gold) {
          throw Error(ErrorKind::kConfiguration,
                      "training example " + ex.id + " has no gold label");
        }
      }
      for (auto seed : config.seeds()) {
        std::vector<Demonstration> demos;
        for (auto idx : sample_without_replacement(
                 train.size(), config.k(), derive_seed(seed, {kRoleFewShot}))) {
          demos.push_back({train[idx], *train[idx].gold});
        }
        SeedRun sr{seed, std::vector<ExampleResult>(n)};
        run_bounded(n, limit, [&](std::size_t i) {
          const auto& ex = dataset[i];
          sr.results[i] = {
              ex.id, ex.gold, score_prompt(task, demos, ex, variant, backend),
              DemonstrationSet{ex.id, Method::kFewShot, seed, demos, {}}};
        });
        run.seeds.push_back(std::move(sr));
      }
      break;
    }
    case Method::kSgIcl: {
      for (auto seed : config.seeds()) {
        SeedRun sr{seed, std::vector<ExampleResult>(n)};
        run_bounded(n, limit, [&](std::size_t i) {
          const auto& ex = dataset[i];
          auto set = self_generate(task, ex, config, backend, seed, cache);
          if (config.shuffle_demos()) {
            portable_shuffle(set.demos, derive_seed(seed, {kRoleShuffle,
                                                           hash_string(ex.id)}));
          }
          auto scored = score_prompt(task, set.demos, ex, variant, backend);
          sr.results[i] = {ex.id, ex.gold, std::move(scored), std::move(set)};
        });
        for (const auto& r : sr.results) {
          run.warnings.insert(run.warnings.end(), r.demos->warnings.begin(),
                              r.demos->warnings.end());
        }
        run.seeds.push_back(std::move(sr));
      }
      break;
    }
  }
  return run;
}

}  // namespace sgicl
