#include "sgicl/pattern.hpp"

#include <array>

#include "sgicl/error.hpp"
#include "sgicl/hash.hpp"

namespace sgicl {
namespace {

constexpr std::array<std::string_view, 5> kKnownSlots = {
    "text_1", "text_2", "field_label_1", "field_label_2", "label_word"};

// Walks the pattern, calling on_text for literal runs and on_slot for
// placeholder names.
template <typename OnText, typename OnSlot>
void scan(std::string_view pattern, OnText on_text, OnSlot on_slot) {
  std::size_t i = 0;
  while (i < pattern.size()) {
    char c = pattern[i];
    if (c == '{' && i + 1 < pattern.size() && pattern[i + 1] == '{') {
      on_text(std::string_view("{"));
      i += 2;
    } else if (c == '}' && i + 1 < pattern.size() && pattern[i + 1] == '}') {
      on_text(std::string_view("}"));
      i += 2;
    } else if (c == '{') {
      auto close = pattern.find('}', i + 1);
      if (close == std::string_view::npos) {
        throw Error(ErrorKind::kTemplateResolution,
                    "unterminated placeholder at offset " + std::to_string(i));
      }
      on_slot(pattern.substr(i + 1, close - i - 1));
      i = close + 1;
    } else if (c == '}') {
      throw Error(ErrorKind::kTemplateResolution,
                  "stray '}' at offset " + std::to_string(i));
    } else {
      auto next = pattern.find_first_of("{}", i);
      if (next == std::string_view::npos) next = pattern.size();
      on_text(pattern.substr(i, next - i));
      i = next;
    }
  }
}

}  // namespace

bool is_known_slot(std::string_view name) {
  for (auto s : kKnownSlots) {
    if (s == name) return true;
  }
  return false;
}

std::string expand_pattern(std::string_view pattern, const SlotLookup& lookup) {
  std::string out;
  out.reserve(pattern.size() * 2);
  scan(
      pattern, [&](std::string_view text) { out.append(text); },
      [&](std::string_view name) {
        if (!is_known_slot(name)) {
          throw Error(ErrorKind::kTemplateResolution,
                      "unknown placeholder {" + std::string(name) + "}");
        }
        auto value = lookup(name);
        if (!value) {
          throw Error(ErrorKind::kTemplateResolution,
                      "no value for placeholder {" + std::string(name) + "}");
        }
        out.append(*value);
      });
  return out;
}

std::vector<std::string> pattern_slots(std::string_view pattern) {
  std::vector<std::string> slots;
  scan(
      pattern, [](std::string_view) {},
      [&](std::string_view name) { slots.emplace_back(name); });
  return slots;
}

InferenceTemplate::InferenceTemplate(TemplateVariant variant,
                                     std::string demo_pattern)
    : variant_(variant), demo_pattern_(std::move(demo_pattern)) {
  std::string_view demo = demo_pattern_;
  if (!demo.ends_with(kLabelSlot)) {
    throw Error(ErrorKind::kTemplateResolution,
                "inference pattern must end with {label_word}");
  }
  query_pattern_ = demo_pattern_.substr(0, demo.size() - kLabelSlot.size());
  for (const auto& slot : pattern_slots(query_pattern_)) {
    if (slot == "label_word") {
      throw Error(ErrorKind::kTemplateResolution,
                  "inference pattern has more than one {label_word}");
    }
  }
}

GenerationTemplate::GenerationTemplate(std::string exemplar_pattern,
                                       std::string directive_pattern,
                                       std::string class_only_directive)
    : exemplar_(std::move(exemplar_pattern)),
      directive_(std::move(directive_pattern)),
      class_only_(std::move(class_only_directive)) {
  auto count_label = [](const std::string& p) {
    std::size_t n = 0;
    for (const auto& s : pattern_slots(p)) n += (s == "label_word");
    return n;
  };
  if (count_label(exemplar_) != 0) {
    throw Error(ErrorKind::kTemplateResolution,
                "generation exemplar must not contain {label_word}");
  }
  static const std::string kQuoted = "\"{label_word}\"";
  for (const auto* p : {&directive_, &class_only_}) {
    if (count_label(*p) != 1 || p->find(kQuoted) == std::string::npos) {
      throw Error(ErrorKind::kTemplateResolution,
                  "generation directive needs exactly one quoted "
                  "\"{label_word}\" slot");
    }
  }
  std::string bytes;
  bytes.append(exemplar_).push_back('\0');
  bytes.append(directive_).push_back('\0');
  bytes.append(class_only_);
  hash_ = fingerprint(bytes);
}

}  // namespace sgicl
