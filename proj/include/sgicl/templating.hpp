#pragma once

#include <span>
#include <string>
#include <variant>

#include "sgicl/core.hpp"

namespace sgicl {

/// Blank line between consecutive blocks of an inference prompt.
inline constexpr std::string_view kDefaultBlockSeparator = "\n\n";

/// An in-context demonstration: a gold example or a generated one, bound to
/// the label it is shown with.
struct Demonstration {
  std::variant<Example, GeneratedDemonstration> item;
  ClassId label = 0;

  bool is_generated() const noexcept {
    return std::holds_alternative<GeneratedDemonstration>(item);
  }
};

/// Self-generation prompt. Throws kInvalidClass for a bad target and
/// kSchema when the example does not match the task.
std::string render_generation_prompt(const TaskSpec& task,
                                     const Example& example, ClassId target,
                                     ConditioningMode mode);

/// Query block T(x): the demonstration format cut off right before the label.
std::string render_query(const TaskSpec& task, const Example& test,
                         TemplateVariant variant);

std::string render_demonstration(const TaskSpec& task, const Example& item,
                                 ClassId label, TemplateVariant variant);
/// Sentence-pair demos render carried_premise as the first field and the
/// generated text as the second.
std::string render_demonstration(const TaskSpec& task,
                                 const GeneratedDemonstration& item,
                                 ClassId label, TemplateVariant variant);
std::string render_demonstration(const TaskSpec& task,
                                 const Demonstration& demo,
                                 TemplateVariant variant);

/// Demo blocks in order, each followed by `separator`, then the query block.
std::string render_inference_prompt(
    const TaskSpec& task, std::span<const Demonstration> demos,
    const Example& test, TemplateVariant variant,
    std::string_view separator = kDefaultBlockSeparator);

}  // namespace sgicl
