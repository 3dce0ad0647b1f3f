// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are the constants below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sgicl/cli.hpp"
#include "sgicl/dataset.hpp"
#include "sgicl/eval.hpp"
#include "sgicl/golden.hpp"
#include "sgicl/pipeline.hpp"
#include "sgicl/report_io.hpp"
#include "sgicl/stub_backend.hpp"

namespace fs = std::filesystem;
using namespace sgicl;

namespace {

constexpr double kTemplateBudgetMs = 1000.0;
constexpr std::size_t kExpectedGoldenFiles = 24;
constexpr std::size_t kBalanceCases = 1000;
constexpr double kBalanceBudgetMs = 5000.0;
constexpr std::size_t kScoringCases = 200;
constexpr std::size_t kCosinePairs = 500;
constexpr double kCosineTolerance = 1e-9;
constexpr double kDeterminismBudgetMs = 30000.0;
constexpr std::size_t kE2eSeeds = 5;
constexpr std::size_t kE2eK = 8;
constexpr std::size_t kE2eExamples = 50;

const fs::path kData = SGICL_TEST_DATA;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fmt_ms(double ms) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(1);
  s << ms << " ms";
  return s.str();
}

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() /
                   ("sgicl-acceptance-" + tag + "-" +
                    std::to_string(Clock::now().time_since_epoch().count()));
  fs::create_directories(dir);
  return dir;
}

// Wraps a backend and records every prompt sent for scoring.
class RecordingBackend final : public Backend {
 public:
  explicit RecordingBackend(Backend& inner) : inner_(inner) {}
  const std::string& id() const override { return inner_.id(); }
  std::string raw_complete(std::string_view prompt, const SamplingConfig& s,
                           std::uint64_t seed) override {
    return inner_.raw_complete(prompt, s, seed);
  }
  std::vector<double> raw_score(std::string_view prompt,
                                std::span<const std::string> c) override {
    std::lock_guard lock(mu_);
    scored_.emplace_back(prompt);
    return inner_.raw_score(prompt, c);
  }
  std::vector<double> raw_embed(std::string_view text) override {
    return inner_.raw_embed(text);
  }
  std::vector<std::string> scored() {
    std::lock_guard lock(mu_);
    return scored_;
  }

 private:
  Backend& inner_;
  std::mutex mu_;
  std::vector<std::string> scored_;
};

Outcome template_fidelity() {
  const auto t0 = Clock::now();
  std::ostringstream out, err;
  const int code = run_cli(
      {"validate-templates", "--golden-dir", (kData / "golden").string()}, out,
      err);
  const double ms = ms_since(t0);
  const auto results = compare_golden(kData / "golden");
  const auto identical = std::count_if(results.begin(), results.end(),
                                       [](const auto& r) { return r.identical; });
  const bool pass = code == 0 && results.size() == kExpectedGoldenFiles &&
                    static_cast<std::size_t>(identical) == results.size() &&
                    ms < kTemplateBudgetMs;
  return {pass, std::to_string(identical) + "/" + std::to_string(results.size()) +
                    " renderings byte-identical, exit " + std::to_string(code) +
                    ", " + fmt_ms(ms) + " (budget " + fmt_ms(kTemplateBudgetMs) +
                    ")"};
}

Outcome class_balance() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1234);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < kBalanceCases; ++i) {
    // Cycle through every (k, classes) combination; seeds are random.
    const std::size_t k = 1 + i % 16;
    const std::size_t classes = 2 + (i / 16) % 4;
    const auto a = assign_classes(k, classes, rng());
    std::vector<std::size_t> counts(classes, 0);
    bool in_range = a.size() == k;
    for (auto c : a) {
      if (c >= classes) {
        in_range = false;
        break;
      }
      ++counts[c];
    }
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    if (!in_range || *hi - *lo > 1) ++bad;
  }
  const double ms = ms_since(t0);
  return {bad == 0 && ms < kBalanceBudgetMs,
          std::to_string(kBalanceCases - bad) + "/" +
              std::to_string(kBalanceCases) + " cases within 1, " + fmt_ms(ms) +
              " (budget " + fmt_ms(kBalanceBudgetMs) + ")"};
}

// Lowest index among the maximal scores, found by sorting (score desc, id asc).
ClassId oracle_argmax(const std::vector<double>& scores) {
  std::vector<ClassId> order(scores.size());
  std::iota(order.begin(), order.end(), ClassId{0});
  std::sort(order.begin(), order.end(), [&](ClassId a, ClassId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order.front();
}

Outcome scoring_oracle() {
  std::mt19937_64 rng(99);
  const auto names = builtin_task_names();
  std::size_t agree = 0;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < kScoringCases; ++i) {
    const auto task = builtin_task(names[i % names.size()]);
    const bool pair = task.arity() == Arity::kSentencePair;
    const Example test{"t" + std::to_string(i), "input " + std::to_string(rng() % 1000) + " .",
                       pair ? std::optional<std::string>("claim " + std::to_string(i) + " .")
                            : std::nullopt};
    std::vector<Demonstration> demos;
    for (std::size_t d = rng() % 4; d > 0; --d) {
      Example gold{"g" + std::to_string(d), "gold " + std::to_string(d) + " .",
                   pair ? std::optional<std::string>("gold claim .") : std::nullopt};
      demos.push_back({gold, rng() % task.num_classes()});
    }
    const auto variant = rng() % 2 ? TemplateVariant::kManual : TemplateVariant::kMinimal;

    // Scores on a coarse grid so exact ties are common; every third case
    // copies the best score onto another class on purpose.
    std::vector<double> scores(task.num_classes());
    for (auto& s : scores) s = -static_cast<double>(rng() % 8) * 0.25;
    if (i % 3 == 0) {
      const auto best = oracle_argmax(scores);
      scores[(best + 1 + rng() % (scores.size() - 1)) % scores.size()] = scores[best];
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    if (std::count(scores.begin(), scores.end(), top) > 1) ++ties;

    StubScript script;
    const auto prompt = render_inference_prompt(task, demos, test, variant);
    for (ClassId c = 0; c < scores.size(); ++c) {
      script.add_score(prompt, task.verbalizer(c), scores[c]);
    }
    StubBackend stub(script);
    if (predict(task, demos, test, variant, stub).predicted == oracle_argmax(scores)) {
      ++agree;
    }
  }
  return {agree == kScoringCases,
          std::to_string(agree) + "/" + std::to_string(kScoringCases) +
              " agree with brute-force scan (" + std::to_string(ties) +
              " cases with tied maxima)"};
}

long double oracle_cosine(const std::vector<double>& u, const std::vector<double>& v) {
  long double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<long double>(u[i]) * v[i];
    uu += static_cast<long double>(u[i]) * u[i];
    vv += static_cast<long double>(v[i]) * v[i];
  }
  return dot / (std::sqrt(uu) * std::sqrt(vv));
}

Outcome cosine_oracle() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  double worst = 0.0;
  std::size_t asymmetric = 0;
  std::size_t decision_flips = 0;
  std::vector<std::vector<double>> us, vs;
  for (std::size_t i = 0; i < kCosinePairs; ++i) {
    const std::size_t dim = 1 + rng() % 64;
    std::vector<double> u(dim), v(dim);
    for (auto& x : u) x = g(rng) * (1 + rng() % 100);
    for (auto& x : v) x = g(rng);
    const double c = cosine(u, v);
    worst = std::max(worst, static_cast<double>(std::fabs(c - oracle_cosine(u, v))));
    if (c != cosine(v, u)) ++asymmetric;
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
  }
  // Decision level: for each query, the most similar of five candidates and
  // the sign of each similarity are unchanged under positive rescaling.
  for (std::size_t q = 0; q + 5 <= kCosinePairs; q += 5) {
    std::vector<double> u(us[q].size());
    for (auto& x : u) x = g(rng);
    std::vector<double> plain, scaled;
    for (std::size_t j = 0; j < 5; ++j) {
      std::vector<double> v(u.size());
      for (auto& x : v) x = g(rng);
      auto su = u;
      auto sv = v;
      const double a = scale(rng), b = scale(rng);
      for (auto& x : su) x *= a;
      for (auto& x : sv) x *= b;
      plain.push_back(cosine(u, v));
      scaled.push_back(cosine(su, sv));
      if ((plain.back() > 0) != (scaled.back() > 0)) ++decision_flips;
    }
    if (std::max_element(plain.begin(), plain.end()) - plain.begin() !=
        std::max_element(scaled.begin(), scaled.end()) - scaled.begin()) {
      ++decision_flips;
    }
  }
  std::ostringstream d;
  d << kCosinePairs << " pairs, max |error| " << worst << " (tolerance "
    << kCosineTolerance << "), " << asymmetric << " asymmetric, "
    << decision_flips << " scale-dependent decisions";
  return {worst <= kCosineTolerance && asymmetric == 0 && decision_flips == 0,
          d.str()};
}

Outcome e2e_determinism() {
  const auto t0 = Clock::now();
  std::vector<fs::path> outs;
  std::vector<int> codes;
  std::string errors;
  for (int run = 0; run < 2; ++run) {
    outs.push_back(fresh_dir("e2e" + std::to_string(run)));
    std::ostringstream out, err;
    codes.push_back(run_cli(
        {"eval", "--task", "sst2", "--method", "sg-icl", "--k", std::to_string(kE2eK),
         "--seeds", "0.." + std::to_string(kE2eSeeds - 1), "--backend",
         (kData / "fixtures" / "stub.toml").string(), "--data",
         (kData / "fixtures" / "sst2_50.tsv").string(), "--limit",
         std::to_string(kE2eExamples), "--out", outs.back().string()},
        out, err));
    errors += err.str();
  }
  const double ms = ms_since(t0);
  std::size_t identical = 0;
  const std::vector<std::string> files{"audit.jsonl", "report.json", "report.txt"};
  for (const auto& f : files) {
    const auto a = read_file(outs[0] / f);
    if (!a.empty() && a == read_file(outs[1] / f)) ++identical;
  }
  const auto audit = read_file(outs[0] / "audit.jsonl");
  const auto lines = std::count(audit.begin(), audit.end(), '\n');
  for (const auto& o : outs) fs::remove_all(o);
  const bool pass = codes[0] == 0 && codes[1] == 0 && identical == files.size() &&
                    static_cast<std::size_t>(lines) == kE2eExamples * kE2eSeeds &&
                    ms < kDeterminismBudgetMs;
  return {pass, std::to_string(identical) + "/" + std::to_string(files.size()) +
                    " files byte-identical, " + std::to_string(lines) +
                    " audit records, " + fmt_ms(ms) + " for two runs (budget " +
                    fmt_ms(kDeterminismBudgetMs) + ")" +
                    (errors.empty() ? "" : "; stderr: " + errors)};
}

Outcome no_training_data() {
  const auto task = builtin_task("sst2");
  const auto data = load_dataset(task, {kData / "fixtures" / "sst2_50.tsv"});
  const TrainingPool pool(
      load_dataset(task, {kData / "fixtures" / "sst2_train_32.tsv", {}, "", "", "",
                          Split::kTrain}));
  StubBackend stub({});
  RunOptions o;
  o.seeds = {0, 1, 2};
  run_method(task, data, RunConfig(o), stub, nullptr, &pool);
  const auto sgicl_reads = pool.access_count();
  // Control: the few-shot path must register reads on the same counter.
  o.method = Method::kFewShot;
  o.k = 4;
  run_method(task, data, RunConfig(o), stub, nullptr, &pool);
  const auto fewshot_reads = pool.access_count() - sgicl_reads;
  return {sgicl_reads == 0 && fewshot_reads > 0,
          "sg-icl reads " + std::to_string(sgicl_reads) +
              ", few-shot control reads " + std::to_string(fewshot_reads)};
}

Outcome sample_worth_check() {
  const auto w = sample_worth({{4, 0.80}, {5, 0.84}}, 0.82, 8);
  std::ostringstream d;
  d.precision(17);
  d << "m = " << w.equivalent_gold << ", worth = " << w.worth
    << " (expected 4.5 and 0.5625 exactly)";
  return {w.equivalent_gold == 4.5 && w.worth == 0.5625 && !w.clamped, d.str()};
}

Outcome zero_shot_degeneracy() {
  std::size_t ok = 0;
  std::size_t total = 0;
  for (const auto& name : builtin_task_names()) {
    const auto task = builtin_task(name);
    const auto ref = reference_sample(name);
    for (auto v : {TemplateVariant::kManual, TemplateVariant::kMinimal}) {
      ++total;
      StubBackend stub({});
      RecordingBackend rec(stub);
      predict(task, {}, ref.example, v, rec);
      const auto expected = read_file(kData / "golden" /
                                      (name + "." + std::string(to_string(v)) + ".query.txt"));
      const auto sent = rec.scored();
      if (sent.size() == 1 && !expected.empty() && sent[0] == expected) ++ok;
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " zero-shot prompts equal the query fixture"};
}

Outcome dataset_validation() {
  std::vector<std::string> notes;
  bool pass = true;

  // Fixture checks: label-map and row-count errors name the right line.
  const auto sst2 = builtin_task("sst2");
  auto expect_row_error = [&](DatasetFile f, ErrorKind kind, std::size_t line,
                              const std::string& label) {
    try {
      load_dataset(sst2, f);
      notes.push_back(label + ": no error");
      pass = false;
    } catch (const RowError& e) {
      const bool good = e.kind() == kind && e.line() == line;
      pass = pass && good;
      notes.push_back(label + ": " + std::string(kind_name(e.kind())) + " at line " +
                      std::to_string(e.line()) + (good ? "" : " (wrong)"));
    }
  };
  expect_row_error({kData / "fixtures" / "sst2_bad_label.tsv"}, ErrorKind::kRow, 2,
                   "bad label");
  DatasetFile over{kData / "fixtures" / "sst2_50.tsv"};
  over.limit = 60;
  expect_row_error(over, ErrorKind::kRowCount, 51, "limit 60 of 50");
  DatasetFile full{kData / "fixtures" / "sst2_50.tsv"};
  full.expect_full_split = true;
  expect_row_error(full, ErrorKind::kRowCount, 51, "50 rows as full split");

  // Full validation splits, when SGICL_DATA_DIR provides them as
  // <task>.validation.tsv or <task>.validation.jsonl.
  const char* env = std::getenv("SGICL_DATA_DIR");
  for (const auto& name : builtin_task_names()) {
    const auto task = builtin_task(name);
    std::optional<fs::path> path;
    for (const char* ext : {".tsv", ".jsonl"}) {
      if (env && fs::exists(fs::path(env) / (name + ".validation" + ext))) {
        path = fs::path(env) / (name + ".validation" + ext);
      }
    }
    if (!path) {
      notes.push_back(name + ": full file absent, skipped");
      continue;
    }
    try {
      DatasetFile f{*path};
      f.expect_full_split = true;
      const auto data = load_dataset(task, f);
      std::set<ClassId> classes;
      for (const auto& ex : data) {
        if (ex.gold) classes.insert(*ex.gold);
      }
      notes.push_back(name + ": " + std::to_string(data.size()) + " examples, " +
                      std::to_string(classes.size()) + " classes");
      pass = pass && task.sizes().validation && data.size() == *task.sizes().validation;
    } catch (const std::exception& e) {
      notes.push_back(name + ": " + e.what());
      pass = false;
    }
  }
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {pass, detail};
}

Outcome cache_correctness() {
  const auto dir = fresh_dir("cache");
  const auto task = builtin_task("sst2");
  const auto data = load_dataset(task, {kData / "fixtures" / "sst2_50.tsv"});
  RunOptions o;
  o.seeds = {0, 1};
  const RunConfig config(o);

  StubBackend cold_stub({});
  GenerationCache cold(dir);
  const auto first = run_method(task, data, config, cold_stub, &cold);
  StubBackend warm_stub({});
  GenerationCache warm(dir);
  const auto second = run_method(task, data, config, warm_stub, &warm);
  fs::remove_all(dir);

  bool same = first.seeds.size() == second.seeds.size();
  for (std::size_t s = 0; same && s < first.seeds.size(); ++s) {
    for (std::size_t i = 0; i < first.seeds[s].results.size(); ++i) {
      same = same && first.seeds[s].results[i].scored.prediction.predicted ==
                         second.seeds[s].results[i].scored.prediction.predicted;
    }
  }
  same = same && audit_jsonl(task, first) == audit_jsonl(task, second);
  return {warm_stub.completion_calls() == 0 && same && cold.puts() > 0,
          "cold run " + std::to_string(cold_stub.completion_calls()) +
              " completion requests, warm run " +
              std::to_string(warm_stub.completion_calls()) + " (" +
              std::to_string(warm.hits()) + " cache hits), predictions " +
              (same ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"template-fidelity", template_fidelity},
      {"class-balance", class_balance},
      {"scoring-oracle", scoring_oracle},
      {"cosine-oracle", cosine_oracle},
      {"e2e-determinism", e2e_determinism},
      {"no-training-data", no_training_data},
      {"sample-worth", sample_worth_check},
      {"zero-shot-degeneracy", zero_shot_degeneracy},
      {"dataset-validation", dataset_validation},
      {"cache-correctness", cache_correctness},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << '\n';
  }
  std::cout << criteria.size() - failures << '/' << criteria.size()
            << " acceptance criteria passed\n";
  return failures == 0 ? 0 : 1;
}
