#include "sgicl/templating.hpp"

#include <optional>

#include "sgicl/error.hpp"

namespace sgicl {
namespace {

struct Fields {
  std::string_view text1;
  std::optional<std::string_view> text2;
};

std::string render(const TaskSpec& task, std::string_view pattern,
                   const Fields& fields, std::optional<ClassId> label) {
  const auto& labels = task.field_labels();
  return expand_pattern(
      pattern, [&](std::string_view name) -> std::optional<std::string_view> {
        if (name == "text_1") return fields.text1;
        if (name == "text_2") return fields.text2;
        if (name == "field_label_1" && !labels.empty()) return labels[0];
        if (name == "field_label_2" && labels.size() > 1) return labels[1];
        if (name == "label_word" && label) return task.verbalizer(*label);
        return std::nullopt;
      });
}

Fields fields_of(const Example& e) {
  Fields f{e.text1, std::nullopt};
  if (e.text2) f.text2 = *e.text2;
  return f;
}

Fields fields_of(const TaskSpec& task, const GeneratedDemonstration& d) {
  if (task.arity() == Arity::kSentencePair) {
    if (!d.carried_premise) {
      throw Error(ErrorKind::kTemplateResolution,
                  "generated demonstration for " + d.source_example_id +
                      " has no carried premise");
    }
    return Fields{*d.carried_premise, std::string_view(d.generated_text)};
  }
  return Fields{d.generated_text, std::nullopt};
}

}  // namespace

std::string render_generation_prompt(const TaskSpec& task,
                                     const Example& example, ClassId target,
                                     ConditioningMode mode) {
  validate_example(task, example);
  task.verbalizer(target);
  const auto& gen = task.generation_template();
  const Fields fields = fields_of(example);
  if (mode == ConditioningMode::kClassOnly) {
    return render(task, gen.class_only_directive(), fields, target);
  }
  std::string prompt = render(task, gen.exemplar_pattern(), fields, target);
  prompt.push_back('\n');
  prompt += render(task, gen.directive_pattern(), fields, target);
  return prompt;
}

std::string render_query(const TaskSpec& task, const Example& test,
                         TemplateVariant variant) {
  return render(task, task.inference_template(variant).query_pattern(),
                fields_of(test), std::nullopt);
}

std::string render_demonstration(const TaskSpec& task, const Example& item,
                                 ClassId label, TemplateVariant variant) {
  return render(task, task.inference_template(variant).demo_pattern(),
                fields_of(item), label);
}

std::string render_demonstration(const TaskSpec& task,
                                 const GeneratedDemonstration& item,
                                 ClassId label, TemplateVariant variant) {
  return render(task, task.inference_template(variant).demo_pattern(),
                fields_of(task, item), label);
}

std::string render_demonstration(const TaskSpec& task,
                                 const Demonstration& demo,
                                 TemplateVariant variant) {
  return std::visit(
      [&](const auto& item) {
        return render_demonstration(task, item, demo.label, variant);
      },
      demo.item);
}

std::string render_inference_prompt(const TaskSpec& task,
                                    std::span<const Demonstration> demos,
                                    const Example& test,
                                    TemplateVariant variant,
                                    std::string_view separator) {
  std::string prompt;
  for (const auto& demo : demos) {
    prompt += render_demonstration(task, demo, variant);
    prompt += separator;
  }
  prompt += render_query(task, test, variant);
  return prompt;
}

}  // namespace sgicl
