#include "sgicl/dataset.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sgicl/error.hpp"

namespace sgicl {
namespace {

constexpr std::array<std::string_view, 4> kText1Defaults = {
    "sentence", "text", "sentence1", "premise"};
constexpr std::array<std::string_view, 2> kText2Defaults = {"sentence2",
                                                            "hypothesis"};

std::string line_id(std::size_t line) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", line);
  return buf;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Column names resolved against the file's available fields.
struct Columns {
  std::string text1;
  std::string text2;  // empty for single-sentence tasks
  std::string label;
};

template <typename Has>
Columns resolve_columns(const TaskSpec& task, const DatasetFile& file,
                        Has&& has) {
  auto pick = [&](const std::string& explicit_name, auto defaults,
                  std::string_view what) -> std::string {
    if (!explicit_name.empty()) {
      if (!has(explicit_name)) {
        throw Error(ErrorKind::kSchema, file.path.string() + ": no " +
                                            std::string(what) + " column '" +
                                            explicit_name + "'");
      }
      return explicit_name;
    }
    for (auto d : defaults) {
      if (has(std::string(d))) return std::string(d);
    }
    return {};
  };
  Columns c;
  c.text1 = pick(file.text1_field, kText1Defaults, "text");
  if (c.text1.empty()) {
    throw Error(ErrorKind::kSchema,
                file.path.string() + ": no text column found");
  }
  const std::string text2 = pick(file.text2_field, kText2Defaults, "second text");
  if (task.arity() == Arity::kSentencePair) {
    if (text2.empty()) {
      throw Error(ErrorKind::kSchema,
                  file.path.string() + ": task " + task.name() +
                      " is sentence-pair but the file has no second text "
                      "column");
    }
    c.text2 = text2;
  } else if (!text2.empty()) {
    throw Error(ErrorKind::kSchema,
                file.path.string() + ": task " + task.name() +
                    " is single-sentence but the file has a second text "
                    "column '" + text2 + "'");
  }
  c.label = file.label_field.empty() ? "label" : file.label_field;
  if (!has(c.label)) {
    if (!file.label_field.empty()) {
      throw Error(ErrorKind::kSchema, file.path.string() + ": no label column '" +
                                          c.label + "'");
    }
    c.label.clear();
  }
  return c;
}

Example make_example(const TaskSpec& task, std::size_t line,
                     std::string text1, std::optional<std::string> text2,
                     const std::optional<std::string>& label) {
  Example ex{line_id(line), std::move(text1), std::move(text2), std::nullopt};
  if (label && !label->empty()) {
    ex.gold = task.class_for_label(*label);
    if (!ex.gold) {
      throw RowError(ErrorKind::kRow, line,
                     "label '" + *label + "' does not map to a class of task " +
                         task.name());
    }
  }
  try {
    validate_example(task, ex);
  } catch (const Error& e) {
    throw RowError(ErrorKind::kRow, line, e.what());
  }
  return ex;
}

DatasetFormat infer_format(const DatasetFile& file) {
  if (file.format) return *file.format;
  const auto ext = file.path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return DatasetFormat::kJsonl;
  return DatasetFormat::kTsv;
}

}  // namespace

std::string_view to_string(Split s) {
  return s == Split::kTrain ? "train" : "validation";
}

std::vector<Example> load_dataset(const TaskSpec& task,
                                  const DatasetFile& file) {
  std::ifstream in(file.path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kConfiguration,
                "cannot open dataset " + file.path.string());
  }
  const DatasetFormat format = infer_format(file);
  std::vector<Example> out;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t data_rows = 0;
  std::vector<std::string> header;
  std::optional<Columns> columns;
  std::array<std::size_t, 3> col_idx{};  // text1, text2, label for TSV

  auto limit_reached = [&] { return file.limit && out.size() >= *file.limit; };

  while (!limit_reached() && std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (format == DatasetFormat::kTsv && line_no == 1) {
      header = split_tabs(line);
      auto find = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
          if (header[i] == name) return i;
        }
        return header.size();
      };
      columns = resolve_columns(task, file, [&](const std::string& n) {
        return find(n) < header.size();
      });
      col_idx = {find(columns->text1),
                 columns->text2.empty() ? header.size() : find(columns->text2),
                 columns->label.empty() ? header.size() : find(columns->label)};
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    ++data_rows;
    if (data_rows <= file.offset) continue;

    if (format == DatasetFormat::kTsv) {
      auto cells = split_tabs(line);
      if (cells.size() != header.size()) {
        throw RowError(ErrorKind::kRow, line_no,
                       "expected " + std::to_string(header.size()) +
                           " tab-separated fields, found " +
                           std::to_string(cells.size()));
      }
      std::optional<std::string> text2;
      if (col_idx[1] < cells.size()) text2 = cells[col_idx[1]];
      std::optional<std::string> label;
      if (col_idx[2] < cells.size()) label = cells[col_idx[2]];
      out.push_back(make_example(task, line_no, cells[col_idx[0]],
                                 std::move(text2), label));
      continue;
    }

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw RowError(ErrorKind::kRow, line_no,
                     std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) {
      throw RowError(ErrorKind::kRow, line_no, "expected a JSON object");
    }
    if (!columns) {
      columns = resolve_columns(task, file, [&](const std::string& n) {
        return obj.contains(n);
      });
    }
    auto text_field = [&](const std::string& name) -> std::string {
      if (!obj.contains(name) || !obj[name].is_string()) {
        throw RowError(ErrorKind::kRow, line_no,
                       "field '" + name + "' missing or not a string");
      }
      return obj[name].get<std::string>();
    };
    std::optional<std::string> text2;
    if (!columns->text2.empty()) text2 = text_field(columns->text2);
    std::optional<std::string> label;
    if (!columns->label.empty() && obj.contains(columns->label)) {
      const auto& l = obj[columns->label];
      if (l.is_string()) {
        label = l.get<std::string>();
      } else if (l.is_number_integer()) {
        label = std::to_string(l.get<long long>());
      } else if (!l.is_null()) {
        throw RowError(ErrorKind::kRow, line_no, "label must be string or int");
      }
    }
    out.push_back(make_example(task, line_no, text_field(columns->text1),
                               std::move(text2), label));
  }

  if (format == DatasetFormat::kTsv && line_no == 0) {
    throw Error(ErrorKind::kSchema, file.path.string() + ": missing header row");
  }
  if (file.limit && out.size() < *file.limit) {
    throw RowError(ErrorKind::kRowCount, line_no,
                   "requested " + std::to_string(*file.limit) +
                       " examples, file ends after " +
                       std::to_string(out.size()));
  }
  if (file.expect_full_split && !file.limit && file.offset == 0) {
    const auto& sizes = task.sizes();
    const auto expected =
        file.split == Split::kTrain ? sizes.train : sizes.validation;
    if (expected && out.size() != *expected) {
      throw RowError(ErrorKind::kRowCount, line_no,
                     "full " + std::string(to_string(file.split)) +
                         " split of " + task.name() + " has " +
                         std::to_string(*expected) + " examples, file has " +
                         std::to_string(out.size()));
    }
  }
  return out;
}

}  // namespace sgicl
