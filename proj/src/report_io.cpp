#include "sgicl/report_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "sgicl/error.hpp"
#include "sgicl/hash.hpp"
#include "sgicl/records.hpp"

namespace sgicl {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

}  // namespace

json to_json(const MethodReport& r) {
  return {{"task", r.task},
          {"method", std::string(to_string(r.method))},
          {"k", r.k},
          {"variant", std::string(to_string(r.variant))},
          {"seeds", r.seeds},
          {"per_seed_accuracy", r.per_seed},
          {"mean", r.mean},
          {"std", r.std_dev},
          {"min", r.min},
          {"max", r.max}};
}

json to_json(const SimilarityReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"example_id", p.example_id},
                     {"seed", p.seed},
                     {"target_class", p.target_class},
                     {"similarity", p.similarity}});
  }
  return {{"task", r.task},
          {"conditioning_mode", std::string(to_string(r.mode))},
          {"mean_similarity", r.mean_similarity},
          {"pairs", pairs}};
}

json to_json(const SampleWorth& w) {
  return {{"equivalent_gold", w.equivalent_gold},
          {"worth", w.worth},
          {"clamped", w.clamped}};
}

std::string format_reports(std::span<const MethodReport> reports) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "task" << std::setw(11) << "method"
      << std::right << std::setw(4) << "k" << "  " << std::left << std::setw(9)
      << "variant" << std::right << std::setw(7) << "seeds" << std::setw(9)
      << "mean" << std::setw(9) << "std" << std::setw(9) << "min"
      << std::setw(9) << "max" << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(8) << r.task << std::setw(11)
        << to_string(r.method) << std::right << std::setw(4) << r.k << "  "
        << std::left << std::setw(9) << to_string(r.variant) << std::right
        << std::setw(7) << r.seeds.size() << std::setw(9) << fixed(r.mean, 4)
        << std::setw(9) << fixed(r.std_dev, 4) << std::setw(9)
        << fixed(r.min, 4) << std::setw(9) << fixed(r.max, 4) << '\n';
  }
  return out.str();
}

std::string sweep_csv(std::span<const MethodReport> reports) {
  std::ostringstream out;
  out << "method,k,variant,seed,accuracy\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
      out << to_string(r.method) << ',' << r.k << ',' << to_string(r.variant)
          << ',' << r.seeds[i] << ',' << json(r.per_seed[i]).dump() << '\n';
    }
  }
  return out.str();
}

std::string audit_jsonl(const TaskSpec& task, const MethodRun& run) {
  std::string out;
  for (const auto& sr : run.seeds) {
    for (const auto& r : sr.results) {
      json demos = json::array();
      if (r.demos) {
        for (const auto& d : r.demos->demos) demos.push_back(to_json(task, d));
      }
      json rec = to_json(task, r.scored.prediction);
      rec["task"] = run.task;
      rec["method"] = std::string(to_string(run.method));
      rec["k"] = run.k;
      rec["variant"] = std::string(to_string(run.variant));
      rec["seed"] = sr.seed;
      rec["example_id"] = r.example_id;
      rec["gold"] = r.gold ? json(task.verbalizer(*r.gold)) : json(nullptr);
      rec["correct"] =
          r.gold ? json(*r.gold == r.scored.prediction.predicted) : json(nullptr);
      rec["prompt_fingerprint"] = fingerprint(r.scored.prompt);
      rec["demos"] = std::move(demos);
      if (r.demos && !r.demos->warnings.empty()) {
        rec["warnings"] = r.demos->warnings;
      }
      out += dump_line(rec);
      out.push_back('\n');
    }
  }
  return out;
}

std::map<std::pair<std::string, std::size_t>, std::vector<double>>
accuracies_from_audit(std::string_view audit) {
  // (method, k) -> seed -> (correct, total), seeds in first-seen order.
  std::map<std::pair<std::string, std::size_t>,
           std::vector<std::pair<std::uint64_t, std::pair<std::size_t, std::size_t>>>>
      tally;
  std::istringstream in{std::string(audit)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto rec = json::parse(line);
    if (rec.at("correct").is_null()) {
      throw Error(ErrorKind::kInput, "audit record without gold label");
    }
    auto& seeds = tally[{rec.at("method").get<std::string>(),
                         rec.at("k").get<std::size_t>()}];
    const auto seed = rec.at("seed").get<std::uint64_t>();
    auto it = std::find_if(seeds.begin(), seeds.end(),
                           [&](const auto& s) { return s.first == seed; });
    if (it == seeds.end()) {
      seeds.push_back({seed, {0, 0}});
      it = std::prev(seeds.end());
    }
    it->second.first += rec.at("correct").get<bool>();
    it->second.second += 1;
  }
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> out;
  for (const auto& [key, seeds] : tally) {
    for (const auto& [seed, counts] : seeds) {
      out[key].push_back(static_cast<double>(counts.first) /
                         static_cast<double>(counts.second));
    }
  }
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw Error(ErrorKind::kInput, "cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kInput, "cannot write " + path.string());
}

}  // namespace sgicl
