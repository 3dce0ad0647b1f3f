#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "sgicl/eval.hpp"
#include "sgicl/pipeline.hpp"

namespace sgicl {

nlohmann::json to_json(const MethodReport& report);
nlohmann::json to_json(const SimilarityReport& report);
nlohmann::json to_json(const SampleWorth& worth);

/// Aligned plain-text table, one row per report.
std::string format_reports(std::span<const MethodReport> reports);

/// Long-format CSV: method,k,variant,seed,accuracy (one row per seed).
std::string sweep_csv(std::span<const MethodReport> reports);

/// One JSON object per (seed, example), seed-major, in dataset order.
std::string audit_jsonl(const TaskSpec& task, const MethodRun& run);

/// Rebuilds per-seed accuracy lists from audit lines, keyed by
/// (method, k), in first-seen seed order.
std::map<std::pair<std::string, std::size_t>, std::vector<double>>
accuracies_from_audit(std::string_view audit);

/// Writes via a temp file + rename in the target directory.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace sgicl
