#include "sgicl/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "sgicl/error.hpp"
#include "sgicl/remote_backend.hpp"
#include "sgicl/stub_backend.hpp"

namespace sgicl {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_fail(const std::string& origin, std::size_t line,
                              const std::string& why) {
  throw Error(ErrorKind::kConfiguration,
              origin + ":" + std::to_string(line) + ": " + why);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kConfiguration, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::kConfiguration,
                "expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text,
                                     const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      config_fail(origin, line_no, "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) config_fail(origin, line_no, "empty key");
    if (cfg.values_.contains(key)) {
      config_fail(origin, line_no, "duplicate key '" + key + "'");
    }
    json parsed;
    if (!value.empty() &&
        (value.front() == '"' || value.front() == '[' || value.front() == '{')) {
      try {
        parsed = json::parse(value, nullptr, true, true);
      } catch (const json::exception& e) {
        config_fail(origin, line_no, "bad value for '" + key + "': " + e.what());
      }
    } else {
      if (auto hash = value.find(" #"); hash != std::string_view::npos) {
        value = trim(value.substr(0, hash));
      }
      parsed = std::string(value);
    }
    cfg.values_.emplace(key, std::move(parsed));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const fs::path& path) {
  return parse(read_file(path), path.string());
}

const json* KeyValueConfig::find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::optional<std::string> KeyValueConfig::get_string(
    const std::string& key) const {
  const json* v = find(key);
  if (!v) return std::nullopt;
  if (v->is_string()) return v->get<std::string>();
  return v->dump();
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  auto v = get_string(key);
  if (!v) {
    throw Error(ErrorKind::kConfiguration,
                origin_ + ": missing required key '" + key + "'");
  }
  return *v;
}

std::optional<std::uint64_t> KeyValueConfig::get_unsigned(
    const std::string& key) const {
  const json* v = find(key);
  if (!v) return std::nullopt;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  try {
    return parse_u64(get_string(key).value());
  } catch (const Error&) {
    throw Error(ErrorKind::kConfiguration,
                origin_ + ": '" + key + "' must be a non-negative integer");
  }
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  const json* v = find(key);
  if (!v) return std::nullopt;
  if (v->is_number()) return v->get<double>();
  const auto s = get_string(key).value();
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::kConfiguration,
                origin_ + ": '" + key + "' must be a number");
  }
  return d;
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
  const json* v = find(key);
  if (!v) return std::nullopt;
  if (v->is_boolean()) return v->get<bool>();
  const auto s = get_string(key).value();
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorKind::kConfiguration,
              origin_ + ": '" + key + "' must be true or false");
}

void KeyValueConfig::set(const std::string& key, json value) {
  values_[key] = std::move(value);
}

std::string serialize_task(const TaskSpec& task) {
  const auto def = task.definition();
  json classes = json::array();
  for (const auto& c : def.classes) {
    classes.push_back({{"name", c.name}, {"word", c.word}});
  }
  json label_map = json::object();
  for (const auto& [label, id] : def.label_map) label_map[label] = id;

  std::ostringstream out;
  auto line = [&](const char* key, const json& value) {
    out << key << " = " << value.dump() << '\n';
  };
  out << "# sgicl task file\n";
  line("name", def.name);
  line("arity", std::string(to_string(def.arity)));
  line("field_labels", def.field_labels);
  line("classes", classes);
  line("manual", def.manual_pattern);
  line("minimal", def.minimal_pattern);
  line("generation.exemplar", def.generation_exemplar);
  line("generation.directive", def.generation_directive);
  line("generation.class_only", def.generation_class_only);
  line("label_map", label_map);
  if (def.sizes.train) line("train_size", *def.sizes.train);
  if (def.sizes.validation) line("validation_size", *def.sizes.validation);
  return out.str();
}

TaskSpec parse_task(const KeyValueConfig& file) {
  static const std::set<std::string> kKeys = {
      "name",    "arity",   "field_labels",        "classes",
      "manual",  "minimal", "generation.exemplar", "generation.directive",
      "generation.class_only", "label_map", "train_size", "validation_size"};
  for (const auto& [key, _] : file.values()) {
    if (!kKeys.contains(key)) {
      throw Error(ErrorKind::kConfiguration,
                  file.origin() + ": unknown task key '" + key + "'");
    }
  }
  TaskDefinition def;
  try {
    def.name = file.require_string("name");
    def.arity = parse_arity(file.require_string("arity"));
    const json* labels = file.find("field_labels");
    const json* classes = file.find("classes");
    if (!labels || !classes) {
      throw Error(ErrorKind::kConfiguration,
                  file.origin() + ": field_labels and classes are required");
    }
    def.field_labels = labels->get<std::vector<std::string>>();
    for (const auto& c : *classes) {
      def.classes.push_back(
          {c.at("name").get<std::string>(), c.at("word").get<std::string>()});
    }
    def.manual_pattern = file.require_string("manual");
    def.minimal_pattern = file.require_string("minimal");
    def.generation_exemplar = file.require_string("generation.exemplar");
    def.generation_directive = file.require_string("generation.directive");
    def.generation_class_only = file.require_string("generation.class_only");
    if (const json* lm = file.find("label_map")) {
      for (const auto& [label, id] : lm->items()) {
        def.label_map[label] = id.get<ClassId>();
      }
    }
    if (auto n = file.get_unsigned("train_size")) def.sizes.train = *n;
    if (auto n = file.get_unsigned("validation_size")) def.sizes.validation = *n;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration,
                file.origin() + ": malformed task file: " + e.what());
  }
  return TaskSpec(std::move(def));
}

TaskSpec load_task_file(const fs::path& path) {
  return parse_task(KeyValueConfig::load(path));
}

TaskSpec resolve_task(const std::string& name_or_path) {
  for (const auto& name : builtin_task_names()) {
    if (name == name_or_path) return builtin_task(name);
  }
  if (fs::is_regular_file(name_or_path)) return load_task_file(name_or_path);
  throw Error(ErrorKind::kNotFound, "no built-in task or task file named '" +
                                        name_or_path + "'");
}

std::unique_ptr<Backend> make_backend(const KeyValueConfig& cfg,
                                      const fs::path& base_dir) {
  const std::string kind = cfg.get_string("kind").value_or("remote");
  if (kind == "stub") {
    StubScript script;
    if (auto path = cfg.get_string("script")) {
      fs::path p(*path);
      if (p.is_relative()) p = base_dir / p;
      script = StubScript::load(p);
    }
    if (auto id = cfg.get_string("id")) script.id = *id;
    if (auto d = cfg.get_string("default_score")) {
      if (*d == "synthetic") {
        script.default_score.reset();
      } else {
        script.default_score = cfg.get_double("default_score");
        if (*script.default_score > 0.0) {
          throw Error(ErrorKind::kConfiguration, "default_score must be <= 0");
        }
      }
    }
    if (auto c = cfg.get_string("completions")) {
      if (*c != "synthetic" && *c != "none") {
        throw Error(ErrorKind::kConfiguration,
                    "completions must be synthetic or none");
      }
      script.synthetic_completions = *c == "synthetic";
    }
    if (auto d = cfg.get_unsigned("embedding_dim")) script.embedding_dim = *d;
    return std::make_unique<StubBackend>(std::move(script));
  }
  if (kind != "remote") {
    throw Error(ErrorKind::kConfiguration,
                cfg.origin() + ": unknown backend kind '" + kind + "'");
  }
  RemoteOptions o;
  o.endpoint = cfg.require_string("endpoint");
  o.model = cfg.get_string("model").value_or("");
  o.embedding_model = cfg.get_string("embedding_model").value_or("");
  if (auto p = cfg.get_string("completions_path")) o.completions_path = *p;
  if (auto p = cfg.get_string("embeddings_path")) o.embeddings_path = *p;
  o.auth_env = cfg.get_string("auth_env").value_or("SGICL_API_TOKEN");
  if (auto s = cfg.get_string("scoring")) {
    if (*s == "echo") {
      o.scoring = ScoringMode::kEcho;
    } else if (*s == "continuation") {
      o.scoring = ScoringMode::kContinuation;
    } else {
      throw Error(ErrorKind::kConfiguration,
                  "scoring must be echo or continuation");
    }
  }
  if (auto s = cfg.get_string("normalize")) {
    if (*s != "sum" && *s != "mean") {
      throw Error(ErrorKind::kConfiguration, "normalize must be sum or mean");
    }
    o.mean_normalize = *s == "mean";
  }
  if (auto n = cfg.get_unsigned("in_flight")) o.max_in_flight = *n;
  if (auto n = cfg.get_unsigned("retries")) o.transport_retries = *n;
  if (auto n = cfg.get_unsigned("backoff_ms")) {
    o.backoff = std::chrono::milliseconds(*n);
  }
  if (auto n = cfg.get_unsigned("timeout_s")) o.timeout = std::chrono::seconds(*n);
  if (auto n = cfg.get_unsigned("top_logprobs")) o.top_logprobs = *n;
  if (o.max_in_flight == 0) {
    throw Error(ErrorKind::kConfiguration, "in_flight must be at least 1");
  }
  return std::make_unique<RemoteBackend>(std::move(o));
}

std::unique_ptr<Backend> load_backend(const fs::path& path) {
  return make_backend(KeyValueConfig::load(path), path.parent_path());
}

std::vector<std::uint64_t> parse_integer_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = trim(text.substr(start, comma - start));
    start = comma + 1;
    if (item.empty()) {
      throw Error(ErrorKind::kConfiguration,
                  "empty item in list '" + std::string(text) + "'");
    }
    if (auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_u64(trim(item.substr(0, dots)));
      const auto hi = parse_u64(trim(item.substr(dots + 2)));
      if (hi < lo || hi - lo > 1'000'000) {
        throw Error(ErrorKind::kConfiguration,
                    "bad range '" + std::string(item) + "'");
      }
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_u64(item));
    }
  }
  return out;
}

}  // namespace sgicl
