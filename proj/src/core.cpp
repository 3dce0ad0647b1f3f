#include "sgicl/core.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "sgicl/error.hpp"

namespace sgicl {
namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& values,
                std::string_view what) {
  for (auto v : values) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorKind::kConfiguration,
              "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

// Every placeholder must be one this task can supply.
void check_slots(const TaskDefinition& def, std::string_view pattern,
                 std::string_view what) {
  const std::size_t fields = def.arity == Arity::kSentencePair ? 2 : 1;
  for (const auto& slot : pattern_slots(pattern)) {
    bool ok = slot == "label_word" || slot == "text_1" ||
              slot == "field_label_1" ||
              (fields == 2 && (slot == "text_2" || slot == "field_label_2"));
    if (!ok) {
      throw Error(ErrorKind::kTemplateResolution,
                  "task " + def.name + ": " + std::string(what) +
                      " uses {" + slot + "} which this task cannot supply");
    }
  }
}

InferenceTemplate make_inference(const TaskDefinition& def, TemplateVariant v,
                                 const std::string& pattern) {
  check_slots(def, pattern, v == TemplateVariant::kManual ? "manual template"
                                                           : "minimal template");
  return InferenceTemplate(v, pattern);
}

GenerationTemplate make_generation(const TaskDefinition& def) {
  check_slots(def, def.generation_exemplar, "generation exemplar");
  check_slots(def, def.generation_directive, "generation directive");
  check_slots(def, def.generation_class_only, "class-only directive");
  for (const auto& slot : pattern_slots(def.generation_class_only)) {
    if (slot != "label_word" && !slot.starts_with("field_label")) {
      throw Error(ErrorKind::kTemplateResolution,
                  "class-only directive must not reference input text");
    }
  }
  return GenerationTemplate(def.generation_exemplar, def.generation_directive,
                            def.generation_class_only);
}

const TaskDefinition& checked(const TaskDefinition& def) {
  if (def.name.empty()) {
    throw Error(ErrorKind::kConfiguration, "task name must not be empty");
  }
  if (def.classes.size() < 2) {
    throw Error(ErrorKind::kConfiguration,
                "task " + def.name + " needs at least two classes");
  }
  std::set<std::string> words;
  for (const auto& c : def.classes) {
    if (c.word.empty() || c.name.empty()) {
      throw Error(ErrorKind::kConfiguration,
                  "task " + def.name + ": empty class name or verbalizer word");
    }
    if (!words.insert(c.word).second) {
      throw Error(ErrorKind::kConfiguration,
                  "task " + def.name + ": verbalizer word '" + c.word +
                      "' is shared by two classes");
    }
  }
  const std::size_t fields = def.arity == Arity::kSentencePair ? 2 : 1;
  if (def.field_labels.size() != fields) {
    throw Error(ErrorKind::kConfiguration,
                "task " + def.name + " needs " + std::to_string(fields) +
                    " field label(s)");
  }
  for (const auto& [label, id] : def.label_map) {
    if (id >= def.classes.size()) {
      throw Error(ErrorKind::kConfiguration,
                  "task " + def.name + ": label '" + label +
                      "' maps to a missing class");
    }
  }
  return def;
}

}  // namespace

std::string_view to_string(Arity a) {
  return a == Arity::kSingleSentence ? "single-sentence" : "sentence-pair";
}
std::string_view to_string(TemplateVariant v) {
  return v == TemplateVariant::kManual ? "manual" : "minimal";
}
std::string_view to_string(ConditioningMode m) {
  return m == ConditioningMode::kClassOnly ? "class-only" : "input-and-class";
}
std::string_view to_string(Method m) {
  switch (m) {
    case Method::kZeroShot: return "zero-shot";
    case Method::kFewShot: return "few-shot";
    case Method::kSgIcl: return "sg-icl";
  }
  return "unknown";
}

Arity parse_arity(std::string_view s) {
  return parse_enum(s, std::array{Arity::kSingleSentence, Arity::kSentencePair},
                    "arity");
}
TemplateVariant parse_variant(std::string_view s) {
  return parse_enum(
      s, std::array{TemplateVariant::kManual, TemplateVariant::kMinimal},
      "template variant");
}
ConditioningMode parse_conditioning_mode(std::string_view s) {
  return parse_enum(s,
                    std::array{ConditioningMode::kClassOnly,
                               ConditioningMode::kInputAndClass},
                    "conditioning mode");
}
Method parse_method(std::string_view s) {
  return parse_enum(
      s, std::array{Method::kZeroShot, Method::kFewShot, Method::kSgIcl},
      "method");
}

TaskSpec::TaskSpec(TaskDefinition def)
    : name_(checked(def).name),
      arity_(def.arity),
      classes_(def.classes),
      field_labels_(def.field_labels),
      manual_(make_inference(def, TemplateVariant::kManual, def.manual_pattern)),
      minimal_(
          make_inference(def, TemplateVariant::kMinimal, def.minimal_pattern)),
      generation_(make_generation(def)),
      label_map_(def.label_map),
      sizes_(def.sizes) {}

const std::string& TaskSpec::verbalizer(ClassId id) const {
  if (id >= classes_.size()) {
    throw Error(ErrorKind::kInvalidClass,
                "class " + std::to_string(id) + " is not a class of task " +
                    name_);
  }
  return classes_[id].word;
}

std::vector<std::string> TaskSpec::verbalizer_words() const {
  std::vector<std::string> words;
  words.reserve(classes_.size());
  for (const auto& c : classes_) words.push_back(c.word);
  return words;
}

const InferenceTemplate& TaskSpec::inference_template(TemplateVariant v) const {
  return v == TemplateVariant::kManual ? manual_ : minimal_;
}

std::optional<ClassId> TaskSpec::class_for_label(std::string_view label) const {
  if (auto it = label_map_.find(std::string(label)); it != label_map_.end()) {
    return it->second;
  }
  for (ClassId i = 0; i < classes_.size(); ++i) {
    if (classes_[i].name == label || classes_[i].word == label) return i;
  }
  return std::nullopt;
}

TaskDefinition TaskSpec::definition() const {
  return TaskDefinition{
      .name = name_,
      .arity = arity_,
      .classes = classes_,
      .field_labels = field_labels_,
      .manual_pattern = manual_.demo_pattern(),
      .minimal_pattern = minimal_.demo_pattern(),
      .generation_exemplar = generation_.exemplar_pattern(),
      .generation_directive = generation_.directive_pattern(),
      .generation_class_only = generation_.class_only_directive(),
      .label_map = label_map_,
      .sizes = sizes_,
  };
}

void validate_example(const TaskSpec& task, const Example& example) {
  if (is_blank(example.text1)) {
    throw Error(ErrorKind::kSchema, "example " + example.id + ": empty text");
  }
  const bool pair = task.arity() == Arity::kSentencePair;
  if (pair != example.text2.has_value()) {
    throw Error(ErrorKind::kSchema,
                "example " + example.id + ": task " + task.name() + " is " +
                    std::string(to_string(task.arity())) + " but the example " +
                    (pair ? "has one text field" : "has two text fields"));
  }
  if (pair && is_blank(*example.text2)) {
    throw Error(ErrorKind::kSchema,
                "example " + example.id + ": empty second text");
  }
  if (example.gold && *example.gold >= task.num_classes()) {
    throw Error(ErrorKind::kInvalidClass,
                "example " + example.id + ": gold class out of range");
  }
}

void validate_demonstration(const TaskSpec& task,
                            const GeneratedDemonstration& demo,
                            std::span<const std::string> stop_sequences) {
  auto fail = [&](const std::string& why) {
    throw GenerationFailedError(demo.provenance.template_hash,
                                "demonstration for " + demo.source_example_id +
                                    ": " + why);
  };
  if (demo.target_class >= task.num_classes()) fail("target class out of range");
  if (is_blank(demo.generated_text)) fail("empty generated text");
  for (const auto& stop : stop_sequences) {
    if (!stop.empty() && demo.generated_text.find(stop) != std::string::npos) {
      fail("generated text contains a stop sequence");
    }
  }
  const bool pair = task.arity() == Arity::kSentencePair;
  if (pair != demo.carried_premise.has_value()) {
    fail(pair ? "missing carried premise" : "unexpected carried premise");
  }
}

ClassId argmax_class(std::span<const double> scores) {
  if (scores.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "argmax over no scores");
  }
  ClassId best = 0;
  for (ClassId i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Prediction Prediction::from_scores(std::vector<double> scores) {
  ClassId best = argmax_class(scores);
  return Prediction{std::move(scores), best};
}

void SamplingConfig::validate() const {
  if (!(temperature > 0.0)) {
    throw Error(ErrorKind::kConfiguration, "temperature must be positive");
  }
  if (max_new_tokens == 0) {
    throw Error(ErrorKind::kConfiguration, "max_new_tokens must be at least 1");
  }
}

RunConfig::RunConfig(RunOptions options) : o_(std::move(options)) {
  if (o_.method == Method::kZeroShot && o_.k != 0) {
    throw Error(ErrorKind::kConfiguration, "zero-shot requires k = 0");
  }
  if (o_.method != Method::kZeroShot && o_.k == 0) {
    throw Error(ErrorKind::kConfiguration,
                std::string(to_string(o_.method)) + " requires k >= 1");
  }
  if (o_.seeds.empty()) {
    throw Error(ErrorKind::kConfiguration, "at least one seed is required");
  }
  o_.sampling.validate();
}

}  // namespace sgicl
