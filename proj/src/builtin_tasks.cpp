#include "sgicl/core.hpp"
#include "sgicl/error.hpp"

namespace sgicl {
namespace {

// Generation directive shared by both sentiment tasks. The two spaces
// after the quoted word are part of the template.
constexpr const char* kReviewDirective = "Generate a \"{label_word}\"  review : ";
constexpr const char* kHypothesisDirective =
    "Generate a \"{label_word}\"  Hypothesis : ";

TaskDefinition sst2() {
  return {
      .name = "sst2",
      .arity = Arity::kSingleSentence,
      .classes = {{"positive", "positive"}, {"negative", "negative"}},
      .field_labels = {"Review"},
      .manual_pattern = "{field_label_1} : {text_1}\nSentiment : {label_word}",
      .minimal_pattern = "{text_1}\n{label_word}",
      .generation_exemplar = "Generate a review : {text_1}",
      .generation_directive = kReviewDirective,
      .generation_class_only = kReviewDirective,
      // GLUE numbering: 0 = negative, 1 = positive.
      .label_map = {{"0", 1}, {"1", 0}},
      .sizes = {67349, 872},
  };
}

TaskDefinition sst5() {
  return {
      .name = "sst5",
      .arity = Arity::kSingleSentence,
      .classes = {{"very negative", "terrible"},
                  {"negative", "bad"},
                  {"neutral", "okay"},
                  {"positive", "good"},
                  {"very positive", "great"}},
      .field_labels = {"Review"},
      .manual_pattern = "{field_label_1} : {text_1}\nSentiment : {label_word}",
      .minimal_pattern = "{text_1}\n{label_word}",
      .generation_exemplar = "Generate a review : {text_1}",
      .generation_directive = kReviewDirective,
      .generation_class_only = kReviewDirective,
      .label_map = {{"0", 0}, {"1", 1}, {"2", 2}, {"3", 3}, {"4", 4}},
      .sizes = {8544, 2210},
  };
}

TaskDefinition rte() {
  return {
      .name = "rte",
      .arity = Arity::kSentencePair,
      .classes = {{"entailment", "true"}, {"not_entailment", "false"}},
      .field_labels = {"Premise", "Hypothesis"},
      .manual_pattern = "{field_label_1} : {text_1}\n{field_label_2} : "
                        "{text_2}\nTrue or False? {label_word}",
      .minimal_pattern = "{text_1}\n{text_2}\n{label_word}",
      .generation_exemplar =
          "Premise : {text_1}\nGenerate a Hypothesis : {text_2}",
      .generation_directive = kHypothesisDirective,
      .generation_class_only = kHypothesisDirective,
      .label_map = {{"0", 0}, {"1", 1}},
      .sizes = {2490, 277},
  };
}

TaskDefinition cb() {
  return {
      .name = "cb",
      .arity = Arity::kSentencePair,
      .classes = {{"entailment", "yes"},
                  {"contradiction", "no"},
                  {"neutral", "neither"}},
      .field_labels = {"Premise", "Hypothesis"},
      .manual_pattern = "{field_label_1} : {text_1}\n{field_label_2} : "
                        "{text_2}\nYes, No, or Neither? {label_word}",
      .minimal_pattern = "{text_1}\n{text_2}\n{label_word}",
      .generation_exemplar =
          "Premise : {text_1}\nGenerate a Hypothesis : {text_2}",
      .generation_directive = kHypothesisDirective,
      .generation_class_only = kHypothesisDirective,
      .label_map = {{"0", 0}, {"1", 1}, {"2", 2}},
      .sizes = {250, 57},
  };
}

}  // namespace

std::vector<std::string> builtin_task_names() {
  return {"sst2", "sst5", "rte", "cb"};
}

TaskSpec builtin_task(std::string_view name) {
  if (name == "sst2") return TaskSpec(sst2());
  if (name == "sst5") return TaskSpec(sst5());
  if (name == "rte") return TaskSpec(rte());
  if (name == "cb") return TaskSpec(cb());
  throw Error(ErrorKind::kNotFound,
              "no built-in task named '" + std::string(name) + "'");
}

ReferenceSample reference_sample(std::string_view task_name) {
  if (task_name == "sst2") {
    return {{"ref", "a fast , funny , highly enjoyable movie .", {}, 0}, 0, 1};
  }
  if (task_name == "sst5") {
    return {{"ref", "it 's worth taking the kids to .", {}, 4}, 4, 1};
  }
  if (task_name == "rte") {
    return {{"ref",
             "Dana Reeve, the widow of the actor Christopher Reeve, has died "
             "of lung cancer at age 44, according to the Christopher Reeve "
             "Foundation.",
             "Christopher Reeve had an accident.", 1},
            1,
            0};
  }
  if (task_name == "cb") {
    return {{"ref",
             "It was a complex language. Not written down but handed down. One "
             "might say it was peeled down.",
             "the language was peeled down", 0},
            0,
            2};
  }
  throw Error(ErrorKind::kNotFound,
              "no reference sample for task '" + std::string(task_name) + "'");
}

}  // namespace sgicl
