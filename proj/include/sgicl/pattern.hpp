#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgicl {

enum class TemplateVariant { kManual, kMinimal };

// Placeholder syntax used by every template pattern:
//
//   {text_1} {text_2}               example text fields
//   {field_label_1} {field_label_2} task display names for the fields
//   {label_word}                    verbalizer word of the bound class
//
// "{{" and "}}" produce literal braces. Anything else inside braces is a
// template-resolution error.
inline constexpr std::string_view kLabelSlot = "{label_word}";

using SlotLookup =
    std::function<std::optional<std::string_view>(std::string_view name)>;

/// Expands every placeholder through `lookup`. Throws kTemplateResolution when
/// a name is unknown or the lookup has no value for it.
std::string expand_pattern(std::string_view pattern, const SlotLookup& lookup);

/// Placeholder names in order of appearance (duplicates kept).
std::vector<std::string> pattern_slots(std::string_view pattern);

bool is_known_slot(std::string_view name);

/// Inference-time format T(x, y). The demonstration pattern must end with the
/// label slot; the query pattern is everything before it.
class InferenceTemplate {
 public:
  InferenceTemplate(TemplateVariant variant, std::string demo_pattern);

  TemplateVariant variant() const noexcept { return variant_; }
  const std::string& demo_pattern() const noexcept { return demo_pattern_; }
  const std::string& query_pattern() const noexcept { return query_pattern_; }

 private:
  TemplateVariant variant_;
  std::string demo_pattern_;
  std::string query_pattern_;
};

/// Self-generation prompt G(x, V(y)).
class GenerationTemplate {
 public:
  GenerationTemplate(std::string exemplar_pattern,
                     std::string directive_pattern,
                     std::string class_only_directive);

  const std::string& exemplar_pattern() const noexcept { return exemplar_; }
  const std::string& directive_pattern() const noexcept { return directive_; }
  const std::string& class_only_directive() const noexcept {
    return class_only_;
  }

  /// First 16 hex chars of SHA-256 over the three pattern byte strings.
  const std::string& hash() const noexcept { return hash_; }

 private:
  std::string exemplar_;
  std::string directive_;
  std::string class_only_;
  std::string hash_;
};

}  // namespace sgicl
