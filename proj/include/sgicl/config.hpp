#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sgicl/backend.hpp"
#include "sgicl/core.hpp"

namespace sgicl {

/// Flat `key = value` file. Values starting with `"`, `[` or `{` are parsed
/// as single-line JSON; anything else is a bare word (trimmed; a ` #` starts
/// a trailing comment). Blank lines and lines starting with `#` are ignored.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text,
                              const std::string& origin = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.contains(key); }
  /// JSON value for `key`; bare words are stored as JSON strings.
  const nlohmann::json* find(const std::string& key) const;

  /// String form: JSON strings unquoted, other JSON dumped.
  std::optional<std::string> get_string(const std::string& key) const;
  std::string require_string(const std::string& key) const;
  std::optional<std::uint64_t> get_unsigned(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;

  void set(const std::string& key, nlohmann::json value);
  const std::map<std::string, nlohmann::json>& values() const noexcept {
    return values_;
  }
  const std::string& origin() const noexcept { return origin_; }

 private:
  std::map<std::string, nlohmann::json> values_;
  std::string origin_;
};

/// Task files use the KeyValueConfig syntax with these keys:
///
///   name, arity, field_labels (array), classes (array of {name, word}),
///   manual, minimal, generation.exemplar, generation.directive,
///   generation.class_only, label_map (object, optional),
///   train_size / validation_size (optional)
std::string serialize_task(const TaskSpec& task);
TaskSpec parse_task(const KeyValueConfig& file);
TaskSpec load_task_file(const std::filesystem::path& path);

/// Built-in name, or a path to a task file.
TaskSpec resolve_task(const std::string& name_or_path);

/// Builds a backend from `kind = stub | remote` plus its keys:
///
///   stub:   script (path, relative to base_dir), id, default_score,
///           completions, embedding_dim
///   remote: endpoint, model, embedding_model, completions_path,
///           embeddings_path, auth_env, scoring (echo|continuation),
///           normalize (sum|mean), in_flight, retries, backoff_ms,
///           timeout_s, top_logprobs
std::unique_ptr<Backend> make_backend(const KeyValueConfig& cfg,
                                      const std::filesystem::path& base_dir);
std::unique_ptr<Backend> load_backend(const std::filesystem::path& path);

/// "0,1,2" or "0..4" (inclusive); both may be mixed: "1..3,8".
std::vector<std::uint64_t> parse_integer_list(std::string_view text);

}  // namespace sgicl
