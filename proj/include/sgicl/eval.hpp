#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sgicl/backend.hpp"
#include "sgicl/cache.hpp"
#include "sgicl/core.hpp"
#include "sgicl/pipeline.hpp"

namespace sgicl {

/// Fraction of predictions equal to their gold class. Throws kInput on
/// empty or length-mismatched input.
double accuracy(std::span<const ClassId> predicted,
                std::span<const ClassId> golds);
double accuracy(std::span<const Prediction> predictions,
                std::span<const ClassId> golds);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_std(std::span<const double> xs);

/// Seed-aggregated accuracy of one method.
struct MethodReport {
  std::string task;
  Method method = Method::kZeroShot;
  std::size_t k = 0;
  TemplateVariant variant = TemplateVariant::kManual;
  std::vector<std::uint64_t> seeds;
  std::vector<double> per_seed;
  double mean = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;

  /// Fills mean/std/min/max from per_seed.
  static MethodReport from_accuracies(std::string task, Method method,
                                      std::size_t k, TemplateVariant variant,
                                      std::vector<std::uint64_t> seeds,
                                      std::vector<double> per_seed);
};

/// Accuracy per seed of a finished run. Every example needs a gold label.
MethodReport summarize(const MethodRun& run);

/// dot(u, v) / (|u| |v|), clamped into [-1, 1]. Throws kUndefinedSimilarity
/// for zero vectors and kInput for a dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

struct SimilarityPair {
  std::string example_id;
  std::uint64_t seed = 0;
  ClassId target_class = 0;
  double similarity = 0.0;
};

struct SimilarityReport {
  std::string task;
  ConditioningMode mode = ConditioningMode::kInputAndClass;
  double mean_similarity = 0.0;
  std::vector<SimilarityPair> pairs;
};

/// Mean cosine between each input and the demonstrations generated for it
/// under config.conditioning(), over every seed in config. Sentence-pair
/// tasks compare the generated hypothesis with the test hypothesis.
SimilarityReport similarity_analysis(const TaskSpec& task,
                                     std::span<const Example> examples,
                                     const RunConfig& config,
                                     Backend& generator, Backend& embedder,
                                     GenerationCache* cache = nullptr);

/// k = 1..8.
std::vector<std::size_t> default_sweep_ks();

/// One few-shot report per entry of `k_values` (strictly increasing, >= 1),
/// then the SG-ICL report at sgicl_config.k().
std::vector<MethodReport> shot_sweep(const TaskSpec& task,
                                     std::span<const Example> dataset,
                                     std::span<const std::size_t> k_values,
                                     const RunConfig& sgicl_config,
                                     Backend& backend, const TrainingPool& pool,
                                     GenerationCache* cache = nullptr,
                                     std::vector<MethodRun>* runs = nullptr);

struct SampleWorth {
  double equivalent_gold = 0.0;  // m
  double worth = 0.0;            // m / k_sgicl
  bool clamped = false;
};

/// Gold-sample count at which few-shot accuracy reaches `sgicl_accuracy`,
/// by piecewise-linear interpolation over the running maximum of the sweep
/// (so m never decreases as sgicl_accuracy grows). Values outside the
/// sweep clamp to its first/last k. m is rounded to 1e-9.
SampleWorth sample_worth(const std::map<std::size_t, double>& sweep,
                         double sgicl_accuracy, std::size_t k_sgicl);

}  // namespace sgicl
