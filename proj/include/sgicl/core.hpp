#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgicl/pattern.hpp"

namespace sgicl {

/// Zero-based index into TaskSpec::classes(), in verbalizer-table order.
using ClassId = std::size_t;

enum class Arity { kSingleSentence, kSentencePair };
enum class ConditioningMode { kClassOnly, kInputAndClass };
enum class Method { kZeroShot, kFewShot, kSgIcl };

std::string_view to_string(Arity a);
std::string_view to_string(TemplateVariant v);
std::string_view to_string(ConditioningMode m);
std::string_view to_string(Method m);

// Parsers accept the names produced by to_string and throw
// kConfiguration on anything else.
Arity parse_arity(std::string_view s);
TemplateVariant parse_variant(std::string_view s);
ConditioningMode parse_conditioning_mode(std::string_view s);
Method parse_method(std::string_view s);

struct ClassInfo {
  std::string name;  // dataset-facing class name, e.g. "entailment"
  std::string word;  // verbalizer word, scored as the continuation
};

/// Published split sizes, used to check that a "full" split file is complete.
struct SplitSizes {
  std::optional<std::size_t> train;
  std::optional<std::size_t> validation;
};

/// Plain aggregate used to build a TaskSpec.
struct TaskDefinition {
  std::string name;
  Arity arity = Arity::kSingleSentence;
  std::vector<ClassInfo> classes;
  std::vector<std::string> field_labels;
  std::string manual_pattern;
  std::string minimal_pattern;
  std::string generation_exemplar;
  std::string generation_directive;
  std::string generation_class_only;
  /// Extra dataset label strings (e.g. "0", "not_entailment") per class.
  /// Class names and verbalizer words always map to their class.
  std::map<std::string, ClassId> label_map;
  SplitSizes sizes;
};

/// A classification task: classes, verbalizer, templates. Immutable and
/// validated on construction.
class TaskSpec {
 public:
  explicit TaskSpec(TaskDefinition def);

  const std::string& name() const noexcept { return name_; }
  Arity arity() const noexcept { return arity_; }
  std::size_t num_text_fields() const noexcept {
    return arity_ == Arity::kSentencePair ? 2 : 1;
  }
  std::size_t num_classes() const noexcept { return classes_.size(); }
  const std::vector<ClassInfo>& classes() const noexcept { return classes_; }
  const std::vector<std::string>& field_labels() const noexcept {
    return field_labels_;
  }

  /// Throws kInvalidClass when `id` is out of range.
  const std::string& verbalizer(ClassId id) const;
  std::vector<std::string> verbalizer_words() const;

  const InferenceTemplate& inference_template(TemplateVariant v) const;
  const GenerationTemplate& generation_template() const noexcept {
    return generation_;
  }

  const std::map<std::string, ClassId>& label_map() const noexcept {
    return label_map_;
  }
  /// Dataset label string -> class, via label_map, class name, or word.
  std::optional<ClassId> class_for_label(std::string_view label) const;

  const SplitSizes& sizes() const noexcept { return sizes_; }

  /// The definition this task was built from (round-trips through the
  /// constructor).
  TaskDefinition definition() const;

 private:
  std::string name_;
  Arity arity_;
  std::vector<ClassInfo> classes_;
  std::vector<std::string> field_labels_;
  InferenceTemplate manual_;
  InferenceTemplate minimal_;
  GenerationTemplate generation_;
  std::map<std::string, ClassId> label_map_;
  SplitSizes sizes_;
};

struct Example {
  std::string id;
  std::string text1;
  std::optional<std::string> text2;
  std::optional<ClassId> gold;
};

/// Throws kSchema when the example does not fit the task's arity or has an
/// empty text field, kInvalidClass when the gold class is out of range.
void validate_example(const TaskSpec& task, const Example& example);

struct Provenance {
  std::string backend_id;
  std::uint64_t seed = 0;
  std::string template_hash;

  bool operator==(const Provenance&) const = default;
};

struct GeneratedDemonstration {
  std::string source_example_id;
  ClassId target_class = 0;
  std::string generated_text;
  std::optional<std::string> carried_premise;
  ConditioningMode conditioning_mode = ConditioningMode::kInputAndClass;
  Provenance provenance;

  bool operator==(const GeneratedDemonstration&) const = default;
};

/// Throws kGenerationFailed if the demonstration violates its invariants.
void validate_demonstration(const TaskSpec& task,
                            const GeneratedDemonstration& demo,
                            std::span<const std::string> stop_sequences);

/// Index of the largest score; ties go to the lowest index. Throws
/// kInvalidArgument on an empty span.
ClassId argmax_class(std::span<const double> scores);

struct Prediction {
  std::vector<double> scores;  // log-probability per ClassId
  ClassId predicted = 0;

  static Prediction from_scores(std::vector<double> scores);
};

struct SamplingConfig {
  double temperature = 0.5;
  std::size_t max_new_tokens = 64;
  std::vector<std::string> stop_sequences{"\n"};
  std::size_t retry_limit = 3;

  /// Throws kConfiguration on temperature <= 0 or max_new_tokens == 0.
  void validate() const;
};

/// Plain aggregate used to build a RunConfig.
struct RunOptions {
  Method method = Method::kSgIcl;
  std::size_t k = 8;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  TemplateVariant variant = TemplateVariant::kManual;
  ConditioningMode conditioning = ConditioningMode::kInputAndClass;
  SamplingConfig sampling;
  bool shuffle_demos = true;
};

class RunConfig {
 public:
  RunConfig() : RunConfig(RunOptions{}) {}
  /// Throws kConfiguration for zero-shot with k > 0, empty seeds, or an
  /// invalid sampling config.
  explicit RunConfig(RunOptions options);

  Method method() const noexcept { return o_.method; }
  std::size_t k() const noexcept { return o_.k; }
  const std::vector<std::uint64_t>& seeds() const noexcept { return o_.seeds; }
  TemplateVariant variant() const noexcept { return o_.variant; }
  ConditioningMode conditioning() const noexcept { return o_.conditioning; }
  const SamplingConfig& sampling() const noexcept { return o_.sampling; }
  bool shuffle_demos() const noexcept { return o_.shuffle_demos; }
  const RunOptions& options() const noexcept { return o_; }

 private:
  RunOptions o_;
};

// Built-in tasks: sst2, sst5, rte, cb.
std::vector<std::string> builtin_task_names();
/// Throws kNotFound for unknown names.
TaskSpec builtin_task(std::string_view name);

/// The worked instance printed next to each built-in task's templates, with
/// the class it is shown with at inference and at generation time.
struct ReferenceSample {
  Example example;
  ClassId inference_label = 0;
  ClassId generation_label = 0;
};
ReferenceSample reference_sample(std::string_view task_name);

}  // namespace sgicl
