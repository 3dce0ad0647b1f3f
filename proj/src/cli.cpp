#include "sgicl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "sgicl/config.hpp"
#include "sgicl/dataset.hpp"
#include "sgicl/error.hpp"
#include "sgicl/eval.hpp"
#include "sgicl/golden.hpp"
#include "sgicl/pipeline.hpp"
#include "sgicl/report_io.hpp"

#ifndef SGICL_GOLDEN_DIR
#define SGICL_GOLDEN_DIR "tests/golden"
#endif

namespace sgicl {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Keys shared by config files and flags (`--max-new-tokens` sets
// `max_new_tokens`).
struct KeySpec {
  const char* key;
  const char* help;
};

constexpr KeySpec kValueKeys[] = {
    {"task", "built-in task name or task file"},
    {"method", "zero-shot | few-shot | sg-icl"},
    {"k", "demonstrations per prompt (sweep: few-shot k list, e.g. 1..8)"},
    {"seeds", "seed list, e.g. 0..4 or 0,1,2"},
    {"variant", "manual | minimal"},
    {"conditioning_mode", "input-and-class | class-only"},
    {"temperature", "sampling temperature"},
    {"max_new_tokens", "generation length cap"},
    {"retry_limit", "retries per empty or refused generation slot"},
    {"backend", "backend config file"},
    {"embed_backend", "embedding backend config file (similarity)"},
    {"endpoint", "remote endpoint when no backend file is given"},
    {"model", "remote model name"},
    {"embedding_model", "remote embedding model name"},
    {"cache_dir", "generation cache directory"},
    {"data", "evaluation split (TSV or JSONL)"},
    {"train", "training split for few-shot"},
    {"text1_field", "column holding the first text"},
    {"text2_field", "column holding the second text"},
    {"label_field", "column holding the label"},
    {"limit", "load exactly this many examples"},
    {"offset", "skip this many data rows first"},
    {"out", "output directory"},
    {"sgicl_k", "SG-ICL k for sweep"},
    {"golden_dir", "golden fixture directory"},
};

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

class Settings {
 public:
  explicit Settings(KeyValueConfig cfg) : cfg_(std::move(cfg)) {}

  std::optional<std::string> str(const std::string& key) const {
    return cfg_.get_string(key);
  }
  std::string require(const std::string& key) const {
    auto v = str(key);
    if (!v || v->empty()) {
      throw Error(ErrorKind::kConfiguration,
                  "missing --" + dashed(key) + " (or '" + key +
                      "' in the config file)");
    }
    return *v;
  }
  std::optional<std::uint64_t> unsigned_value(const std::string& key) const {
    return cfg_.get_unsigned(key);
  }
  std::optional<double> real(const std::string& key) const {
    return cfg_.get_double(key);
  }
  std::optional<bool> flag(const std::string& key) const {
    return cfg_.get_bool(key);
  }
  std::optional<std::vector<std::uint64_t>> list(const std::string& key) const {
    const auto* v = cfg_.find(key);
    if (!v) return std::nullopt;
    if (v->is_array()) {
      std::vector<std::uint64_t> out;
      for (const auto& x : *v) {
        if (!x.is_number_unsigned()) {
          throw Error(ErrorKind::kConfiguration,
                      "'" + key + "' must hold non-negative integers");
        }
        out.push_back(x.get<std::uint64_t>());
      }
      return out;
    }
    if (v->is_number_unsigned()) return std::vector{v->get<std::uint64_t>()};
    return parse_integer_list(*str(key));
  }
  const KeyValueConfig& raw() const { return cfg_; }

 private:
  KeyValueConfig cfg_;
};

RunConfig run_config(const Settings& s, std::optional<Method> forced_method,
                     std::optional<std::size_t> forced_k) {
  RunOptions o;
  o.method = forced_method ? *forced_method
                           : parse_method(s.str("method").value_or("sg-icl"));
  if (forced_k) {
    o.k = *forced_k;
  } else if (auto k = s.unsigned_value("k")) {
    o.k = *k;
  } else if (o.method == Method::kZeroShot) {
    o.k = 0;
  }
  if (auto seeds = s.list("seeds")) o.seeds = *seeds;
  if (auto v = s.str("variant")) o.variant = parse_variant(*v);
  if (auto m = s.str("conditioning_mode")) {
    o.conditioning = parse_conditioning_mode(*m);
  }
  if (auto t = s.real("temperature")) o.sampling.temperature = *t;
  if (auto n = s.unsigned_value("max_new_tokens")) o.sampling.max_new_tokens = *n;
  if (auto n = s.unsigned_value("retry_limit")) o.sampling.retry_limit = *n;
  if (auto b = s.flag("shuffle_demos")) o.shuffle_demos = *b;
  return RunConfig(std::move(o));
}

std::unique_ptr<Backend> backend_from(const Settings& s,
                                      const std::string& key) {
  if (auto path = s.str(key)) return load_backend(*path);
  if (s.str("endpoint")) return make_backend(s.raw(), fs::current_path());
  throw Error(ErrorKind::kConfiguration,
              "missing --" + dashed(key) + " (or an endpoint)");
}

DatasetFile dataset_file(const Settings& s, const std::string& key,
                         Split split) {
  DatasetFile f;
  f.path = s.require(key);
  f.split = split;
  f.text1_field = s.str("text1_field").value_or("");
  f.text2_field = s.str("text2_field").value_or("");
  f.label_field = s.str("label_field").value_or("");
  if (split == Split::kValidation) {
    if (auto n = s.unsigned_value("limit")) f.limit = *n;
    if (auto n = s.unsigned_value("offset")) f.offset = *n;
    f.expect_full_split = s.flag("full_split").value_or(false);
  }
  return f;
}

std::unique_ptr<GenerationCache> cache_from(const Settings& s) {
  if (auto dir = s.str("cache_dir")) return std::make_unique<GenerationCache>(*dir);
  return nullptr;
}

fs::path out_dir(const Settings& s) {
  fs::path dir = s.str("out").value_or("sgicl-out");
  fs::create_directories(dir);
  return dir;
}

std::string pretty(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

int cmd_generate(const Settings& s, std::ostream& out) {
  const auto task = resolve_task(s.require("task"));
  const auto config = run_config(s, Method::kSgIcl, std::nullopt);
  const auto data = load_dataset(task, dataset_file(s, "data", Split::kValidation));
  auto backend = backend_from(s, "backend");
  auto cache = cache_from(s);
  if (!cache) {
    throw Error(ErrorKind::kConfiguration, "generate needs --cache-dir");
  }
  std::atomic<std::size_t> demos{0};
  std::atomic<std::size_t> dropped{0};
  for (auto seed : config.seeds()) {
    run_bounded(data.size(), backend->max_in_flight(), [&](std::size_t i) {
      auto set = self_generate(task, data[i], config, *backend, seed, cache.get());
      demos += set.demos.size();
      dropped += set.warnings.size();
    });
  }
  out << "generated " << demos << " demonstrations for " << data.size()
      << " examples x " << config.seeds().size() << " seeds ("
      << cache->hits() << " cached, " << cache->puts() << " written, "
      << dropped << " warnings)\n";
  return 0;
}

int cmd_eval(const Settings& s, std::ostream& out) {
  const auto task = resolve_task(s.require("task"));
  const auto config = run_config(s, std::nullopt, std::nullopt);
  const auto data = load_dataset(task, dataset_file(s, "data", Split::kValidation));
  std::optional<TrainingPool> pool;
  if (config.method() == Method::kFewShot) {
    pool.emplace(load_dataset(task, dataset_file(s, "train", Split::kTrain)));
  }
  auto backend = backend_from(s, "backend");
  auto cache = cache_from(s);
  const auto run = run_method(task, data, config, *backend,
                              cache.get(),
                              pool ? &*pool : nullptr);
  const auto report = summarize(run);
  const auto dir = out_dir(s);
  const auto table = format_reports(std::span(&report, 1));
  write_file_atomic(dir / "report.json", pretty(to_json(report)));
  write_file_atomic(dir / "report.txt", table);
  write_file_atomic(dir / "audit.jsonl", audit_jsonl(task, run));
  out << table;
  return 0;
}

int cmd_sweep(const Settings& s, std::ostream& out) {
  const auto task = resolve_task(s.require("task"));
  std::vector<std::size_t> ks = default_sweep_ks();
  if (auto list = s.list("k")) ks.assign(list->begin(), list->end());
  const std::size_t k_sgicl =
      s.unsigned_value("sgicl_k").value_or(ks.empty() ? 8 : ks.back());
  const auto config = run_config(s, Method::kSgIcl, k_sgicl);
  const auto data = load_dataset(task, dataset_file(s, "data", Split::kValidation));
  const TrainingPool pool(
      load_dataset(task, dataset_file(s, "train", Split::kTrain)));
  auto backend = backend_from(s, "backend");
  auto cache = cache_from(s);
  std::vector<MethodRun> runs;
  const auto reports = shot_sweep(task, data, ks, config, *backend, pool,
                                  cache.get(), &runs);

  std::map<std::size_t, double> curve;
  for (const auto& r : reports) {
    if (r.method == Method::kFewShot) curve[r.k] = r.mean;
  }
  const auto worth = sample_worth(curve, reports.back().mean, k_sgicl);

  json j_reports = json::array();
  for (const auto& r : reports) j_reports.push_back(to_json(r));
  const json doc = {{"task", task.name()},
                    {"reports", j_reports},
                    {"sgicl_k", k_sgicl},
                    {"sample_worth", to_json(worth)}};
  std::string audit;
  for (const auto& r : runs) audit += audit_jsonl(task, r);

  std::ostringstream table;
  table << format_reports(reports) << "equivalent gold samples "
        << json(worth.equivalent_gold).dump() << ", worth "
        << json(worth.worth).dump() << (worth.clamped ? " (clamped)" : "")
        << '\n';
  const auto dir = out_dir(s);
  write_file_atomic(dir / "sweep.json", pretty(doc));
  write_file_atomic(dir / "sweep.csv", sweep_csv(reports));
  write_file_atomic(dir / "sweep.txt", table.str());
  write_file_atomic(dir / "audit.jsonl", audit);
  out << table.str();
  return 0;
}

int cmd_similarity(const Settings& s, std::ostream& out) {
  const auto task = resolve_task(s.require("task"));
  const auto data = load_dataset(task, dataset_file(s, "data", Split::kValidation));
  auto generator = backend_from(s, "backend");
  std::unique_ptr<Backend> embed_owner;
  Backend* embedder = generator.get();
  if (s.str("embed_backend")) {
    embed_owner = backend_from(s, "embed_backend");
    embedder = embed_owner.get();
  }
  auto cache = cache_from(s);
  std::vector<ConditioningMode> modes{ConditioningMode::kClassOnly,
                                      ConditioningMode::kInputAndClass};
  if (auto m = s.str("conditioning_mode")) {
    modes = {parse_conditioning_mode(*m)};
  }
  json reports = json::array();
  for (auto mode : modes) {
    RunOptions o = run_config(s, Method::kSgIcl, std::nullopt).options();
    o.conditioning = mode;
    const auto report = similarity_analysis(task, data, RunConfig(o),
                                            *generator, *embedder,
                                            cache.get());
    out << task.name() << ' ' << to_string(mode) << ' '
        << json(report.mean_similarity).dump() << '\n';
    reports.push_back(to_json(report));
  }
  write_file_atomic(out_dir(s) / "similarity.json",
                    pretty({{"reports", reports}}));
  return 0;
}

int cmd_validate_templates(const Settings& s, std::ostream& out) {
  const fs::path dir = s.str("golden_dir").value_or(SGICL_GOLDEN_DIR);
  std::size_t failures = 0;
  const auto results = compare_golden(dir);
  for (const auto& r : results) {
    if (r.identical) continue;
    ++failures;
    out << "DIFF " << r.file;
    if (r.missing) {
      out << " (missing)";
    } else {
      out << " (first difference at byte " << r.first_difference << ")";
    }
    out << '\n';
  }
  out << results.size() - failures << '/' << results.size()
      << " renderings match " << dir.string() << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Self-generated in-context learning tools", "sgicl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file");

  struct Bound {
    CLI::App* sub;
    const char* key;
    CLI::Option* opt;
  };
  std::map<std::string, std::string> values;
  std::vector<Bound> bound;
  std::map<std::string, bool> switches;

  const std::pair<const char*, const char*> commands[] = {
      {"generate", "fill the generation cache for a dataset slice"},
      {"eval", "evaluate one method and write report and audit files"},
      {"sweep", "few-shot k sweep plus SG-ICL and sample worth"},
      {"similarity", "cosine similarity between inputs and generations"},
      {"validate-templates", "byte-compare renderings with golden fixtures"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value config file");
    for (const auto& k : kValueKeys) {
      auto& slot = values[std::string(name) + ":" + k.key];
      bound.push_back(
          {sub, k.key, sub->add_option("--" + dashed(k.key), slot, k.help)});
    }
    sub->add_flag("--no-shuffle", switches[std::string(name) + ":no_shuffle"],
                  "keep demonstrations in generation/sampling order");
    sub->add_flag("--full-split", switches[std::string(name) + ":full_split"],
                  "require the task's published split size");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: configuration: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    KeyValueConfig cfg = config_path.empty() ? KeyValueConfig{}
                                             : KeyValueConfig::load(config_path);
    CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    for (const auto& b : bound) {
      if (b.sub == chosen && b.opt->count() > 0) {
        cfg.set(b.key, values[name + ":" + b.key]);
      }
    }
    if (switches[name + ":no_shuffle"]) cfg.set("shuffle_demos", false);
    if (switches[name + ":full_split"]) cfg.set("full_split", true);
    const Settings settings(std::move(cfg));

    if (name == "generate") return cmd_generate(settings, out);
    if (name == "eval") return cmd_eval(settings, out);
    if (name == "sweep") return cmd_sweep(settings, out);
    if (name == "similarity") return cmd_similarity(settings, out);
    return cmd_validate_templates(settings, out);
  } catch (const Error& e) {
    err << "error: " << kind_name(e.kind()) << ": " << one_line(e.what())
        << '\n';
    return is_configuration_kind(e.kind()) ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
}

}  // namespace sgicl
