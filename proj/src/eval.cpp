#include "sgicl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgicl/error.hpp"

namespace sgicl {

double accuracy(std::span<const ClassId> predicted,
                std::span<const ClassId> golds) {
  if (predicted.size() != golds.size()) {
    throw Error(ErrorKind::kInput,
                "accuracy: " + std::to_string(predicted.size()) +
                    " predictions vs " + std::to_string(golds.size()) +
                    " gold labels");
  }
  if (predicted.empty()) {
    throw Error(ErrorKind::kInput, "accuracy of an empty set is undefined");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    correct += predicted[i] == golds[i];
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double accuracy(std::span<const Prediction> predictions,
                std::span<const ClassId> golds) {
  std::vector<ClassId> predicted;
  predicted.reserve(predictions.size());
  for (const auto& p : predictions) predicted.push_back(p.predicted);
  return accuracy(predicted, golds);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorKind::kInput, "mean of nothing");
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

MethodReport MethodReport::from_accuracies(std::string task, Method method,
                                           std::size_t k,
                                           TemplateVariant variant,
                                           std::vector<std::uint64_t> seeds,
                                           std::vector<double> per_seed) {
  if (per_seed.empty() || per_seed.size() != seeds.size()) {
    throw Error(ErrorKind::kInput, "one accuracy per seed is required");
  }
  MethodReport r;
  r.task = std::move(task);
  r.method = method;
  r.k = k;
  r.variant = variant;
  r.seeds = std::move(seeds);
  r.per_seed = std::move(per_seed);
  r.mean = sgicl::mean(r.per_seed);
  r.std_dev = sample_std(r.per_seed);
  auto [lo, hi] = std::minmax_element(r.per_seed.begin(), r.per_seed.end());
  r.min = *lo;
  r.max = *hi;
  return r;
}

MethodReport summarize(const MethodRun& run) {
  std::vector<std::uint64_t> seeds;
  std::vector<double> accs;
  for (const auto& sr : run.seeds) {
    std::vector<ClassId> predicted;
    std::vector<ClassId> golds;
    for (const auto& r : sr.results) {
      if (!r.gold) {
        throw Error(ErrorKind::kInput,
                    "example " + r.example_id + " has no gold label");
      }
      predicted.push_back(r.scored.prediction.predicted);
      golds.push_back(*r.gold);
    }
    seeds.push_back(sr.seed);
    accs.push_back(accuracy(predicted, golds));
  }
  return MethodReport::from_accuracies(run.task, run.method, run.k,
                                       run.variant, std::move(seeds),
                                       std::move(accs));
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorKind::kInput, "cosine of vectors with different sizes");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (!(uu > 0.0) || !(vv > 0.0)) {
    throw Error(ErrorKind::kUndefinedSimilarity,
                "cosine similarity with a zero vector");
  }
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

SimilarityReport similarity_analysis(const TaskSpec& task,
                                     std::span<const Example> examples,
                                     const RunConfig& config,
                                     Backend& generator, Backend& embedder,
                                     GenerationCache* cache) {
  SimilarityReport report{task.name(), config.conditioning(), 0.0, {}};
  const bool pair = task.arity() == Arity::kSentencePair;
  const std::size_t limit =
      std::min(generator.max_in_flight(), embedder.max_in_flight());
  for (auto seed : config.seeds()) {
    std::vector<std::vector<SimilarityPair>> per_example(examples.size());
    run_bounded(examples.size(), limit, [&](std::size_t i) {
      const auto& ex = examples[i];
      const auto set =
          self_generate(task, ex, config, generator, seed, cache);
      const auto input = embed(embedder, pair ? *ex.text2 : ex.text1);
      for (const auto& demo : set.demos) {
        const auto& gen = std::get<GeneratedDemonstration>(demo.item);
        per_example[i].push_back({ex.id, seed, demo.label,
                                  cosine(input, embed(embedder,
                                                      gen.generated_text))});
      }
    });
    for (auto& v : per_example) {
      report.pairs.insert(report.pairs.end(), v.begin(), v.end());
    }
  }
  if (report.pairs.empty()) {
    throw Error(ErrorKind::kInput, "similarity analysis produced no pairs");
  }
  double sum = 0.0;
  for (const auto& p : report.pairs) sum += p.similarity;
  report.mean_similarity = sum / static_cast<double>(report.pairs.size());
  return report;
}

std::vector<std::size_t> default_sweep_ks() { return {1, 2, 3, 4, 5, 6, 7, 8}; }

std::vector<MethodReport> shot_sweep(const TaskSpec& task,
                                     std::span<const Example> dataset,
                                     std::span<const std::size_t> k_values,
                                     const RunConfig& sgicl_config,
                                     Backend& backend, const TrainingPool& pool,
                                     GenerationCache* cache,
                                     std::vector<MethodRun>* runs) {
  if (k_values.empty()) {
    throw Error(ErrorKind::kConfiguration, "shot sweep needs k values");
  }
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (k_values[i] == 0 || (i > 0 && k_values[i] <= k_values[i - 1])) {
      throw Error(ErrorKind::kConfiguration,
                  "sweep k values must be strictly increasing and >= 1");
    }
  }
  if (sgicl_config.method() != Method::kSgIcl) {
    throw Error(ErrorKind::kConfiguration,
                "shot sweep compares against an sg-icl config");
  }
  std::vector<MethodReport> reports;
  for (auto k : k_values) {
    RunOptions o = sgicl_config.options();
    o.method = Method::kFewShot;
    o.k = k;
    auto run = run_method(task, dataset, RunConfig(o), backend, cache, &pool);
    reports.push_back(summarize(run));
    if (runs) runs->push_back(std::move(run));
  }
  auto run = run_method(task, dataset, sgicl_config, backend, cache, nullptr);
  reports.push_back(summarize(run));
  if (runs) runs->push_back(std::move(run));
  return reports;
}

SampleWorth sample_worth(const std::map<std::size_t, double>& sweep,
                         double sgicl_accuracy, std::size_t k_sgicl) {
  if (sweep.empty() || k_sgicl == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "sample worth needs a sweep and k_sgicl >= 1");
  }
  std::vector<std::pair<double, double>> envelope;  // (k, running max acc)
  for (const auto& [k, acc] : sweep) {
    const double best = envelope.empty() ? acc
                                         : std::max(envelope.back().second, acc);
    envelope.emplace_back(static_cast<double>(k), best);
  }
  SampleWorth out;
  double m = 0.0;
  if (sgicl_accuracy <= envelope.front().second) {
    m = envelope.front().first;
    out.clamped = sgicl_accuracy < envelope.front().second;
  } else if (sgicl_accuracy > envelope.back().second) {
    m = envelope.back().first;
    out.clamped = true;
  } else {
    std::size_t i = 1;
    while (envelope[i].second < sgicl_accuracy) ++i;
    const auto [k0, a0] = envelope[i - 1];
    const auto [k1, a1] = envelope[i];
    m = k0 + (k1 - k0) * (sgicl_accuracy - a0) / (a1 - a0);
  }
  out.equivalent_gold = std::round(m * 1e9) / 1e9;
  out.worth = out.equivalent_gold / static_cast<double>(k_sgicl);
  return out;
}

}  // namespace sgicl
