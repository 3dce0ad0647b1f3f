#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sgicl/core.hpp"

namespace sgicl {

enum class DatasetFormat { kTsv, kJsonl };
enum class Split { kTrain, kValidation };

std::string_view to_string(Split s);

/// Where a split lives and how its columns map onto Example fields.
///
/// TSV files have a header row and no quoting. JSON-lines files hold one
/// object per line; labels may be strings or integers. Empty field names
/// select the first matching default column:
///
///   text1: sentence, text, sentence1, premise
///   text2: sentence2, hypothesis
///   label: label
///
/// A missing or empty label leaves Example::gold unset. Labels are mapped
/// through TaskSpec::class_for_label.
struct DatasetFile {
  std::filesystem::path path;
  std::optional<DatasetFormat> format;  // from the extension when unset
  std::string text1_field;
  std::string text2_field;
  std::string label_field;
  Split split = Split::kValidation;
  /// Load exactly this many rows; a shorter file is a kRowCount error.
  std::optional<std::size_t> limit;
  std::size_t offset = 0;  // data rows to skip before loading
  /// Require exactly the task's published row count for this split.
  bool expect_full_split = false;
};

/// Examples in file order. Ids are the 1-based physical line number,
/// zero-padded to six digits. Row problems throw RowError naming the line.
std::vector<Example> load_dataset(const TaskSpec& task,
                                  const DatasetFile& file);

}  // namespace sgicl
