#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sgicl/core.hpp"
#include "sgicl/error.hpp"
#include "sgicl/hash.hpp"
#include "test_util.hpp"

using namespace sgicl;

namespace {

TaskDefinition tiny_definition() {
  TaskDefinition d;
  d.name = "tiny";
  d.classes = {{"good", "yes"}, {"bad", "no"}};
  d.field_labels = {"Text"};
  d.manual_pattern = "{field_label_1}: {text_1}\nOK? {label_word}";
  d.minimal_pattern = "{text_1} {label_word}";
  d.generation_exemplar = "Write: {text_1}";
  d.generation_directive = "Write a \"{label_word}\" text: ";
  d.generation_class_only = "Write a \"{label_word}\" text: ";
  d.label_map = {{"1", 0}, {"0", 1}};
  return d;
}

}  // namespace

TEST(Hash, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(fingerprint("abc"), "ba7816bf8f01cfea");
}

TEST(Hash, SplitMixReferenceValues) {
  // First two outputs of the reference splitmix64 generator seeded with 0;
  // mix64 advances the state by the golden gamma before mixing.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(mix64(0x9e3779b97f4a7c15ULL), 0x6e789e6aa1b965f4ULL);
}

TEST(Hash, DeriveSeedSeparatesRoles) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 8; ++base) {
    for (std::uint64_t role = 1; role <= 4; ++role) {
      seen.insert(derive_seed(base, {role}));
    }
  }
  EXPECT_EQ(seen.size(), 32u);
  EXPECT_EQ(derive_seed(3, {1, 2}), derive_seed(3, {1, 2}));
  EXPECT_NE(derive_seed(3, {1, 2}), derive_seed(3, {2, 1}));
}

TEST(TaskSpec, BuiltinsAreValidAndInjective) {
  for (const auto& name : builtin_task_names()) {
    const auto task = builtin_task(name);
    const auto words = task.verbalizer_words();
    EXPECT_EQ(std::set<std::string>(words.begin(), words.end()).size(),
              words.size())
        << name;
  }
  EXPECT_EQ(builtin_task("sst5").verbalizer_words(),
            (std::vector<std::string>{"terrible", "bad", "okay", "good", "great"}));
  EXPECT_EQ(builtin_task("cb").verbalizer_words(),
            (std::vector<std::string>{"yes", "no", "neither"}));
  EXPECT_EQ(builtin_task("rte").arity(), Arity::kSentencePair);
  EXPECT_SGICL_ERROR(builtin_task("mnli"), ErrorKind::kNotFound);
}

TEST(TaskSpec, PublishedSplitSizes) {
  EXPECT_EQ(builtin_task("sst2").sizes().validation, 872u);
  EXPECT_EQ(builtin_task("sst5").sizes().validation, 2210u);
  EXPECT_EQ(builtin_task("rte").sizes().validation, 277u);
  EXPECT_EQ(builtin_task("cb").sizes().validation, 57u);
}

TEST(TaskSpec, RejectsDuplicateVerbalizerWords) {
  auto d = tiny_definition();
  d.classes[1].word = "yes";
  EXPECT_SGICL_ERROR(TaskSpec{d}, ErrorKind::kConfiguration);
}

TEST(TaskSpec, RejectsSingleClass) {
  auto d = tiny_definition();
  d.classes.resize(1);
  EXPECT_SGICL_ERROR(TaskSpec{d}, ErrorKind::kConfiguration);
}

TEST(TaskSpec, RejectsSecondTextSlotOnSingleSentenceTask) {
  auto d = tiny_definition();
  d.manual_pattern = "{text_1} {text_2} {label_word}";
  EXPECT_THROW(TaskSpec{d}, Error);
}

TEST(TaskSpec, RejectsPatternWithoutTrailingLabel) {
  auto d = tiny_definition();
  d.minimal_pattern = "{label_word} {text_1}";
  EXPECT_SGICL_ERROR(TaskSpec{d}, ErrorKind::kTemplateResolution);
}

TEST(TaskSpec, VerbalizerOutOfRange) {
  const TaskSpec task(tiny_definition());
  EXPECT_EQ(task.verbalizer(1), "no");
  EXPECT_SGICL_ERROR(task.verbalizer(2), ErrorKind::kInvalidClass);
}

TEST(TaskSpec, LabelLookupOrder) {
  const TaskSpec task(tiny_definition());
  EXPECT_EQ(task.class_for_label("1"), 0u);
  EXPECT_EQ(task.class_for_label("bad"), 1u);
  EXPECT_EQ(task.class_for_label("yes"), 0u);
  EXPECT_FALSE(task.class_for_label("maybe").has_value());
}

TEST(TaskSpec, Sst2LabelsFollowGlue) {
  const auto task = builtin_task("sst2");
  EXPECT_EQ(task.verbalizer(*task.class_for_label("1")), "positive");
  EXPECT_EQ(task.verbalizer(*task.class_for_label("0")), "negative");
}

TEST(TaskSpec, DefinitionRoundTrips) {
  for (const auto& name : builtin_task_names()) {
    const auto task = builtin_task(name);
    const TaskSpec again(task.definition());
    EXPECT_EQ(again.generation_template().hash(),
              task.generation_template().hash());
    EXPECT_EQ(again.verbalizer_words(), task.verbalizer_words());
  }
}

TEST(Example, ArityMismatchIsSchemaError) {
  const auto rte = builtin_task("rte");
  EXPECT_SGICL_ERROR(validate_example(rte, Example{"1", "premise only"}),
                     ErrorKind::kSchema);
  const auto sst2 = builtin_task("sst2");
  EXPECT_SGICL_ERROR(validate_example(sst2, Example{"1", "a", "b"}),
                     ErrorKind::kSchema);
  EXPECT_SGICL_ERROR(validate_example(sst2, Example{"1", "  "}),
                     ErrorKind::kSchema);
  EXPECT_SGICL_ERROR(validate_example(sst2, Example{"1", "a", {}, 2}),
                     ErrorKind::kInvalidClass);
}

TEST(GeneratedDemonstration, Validation) {
  const auto rte = builtin_task("rte");
  GeneratedDemonstration d{"000002", 0, "A cat sat.", "The cat sat on a mat."};
  std::vector<std::string> stops{"\n"};
  EXPECT_NO_THROW(validate_demonstration(rte, d, stops));

  auto no_premise = d;
  no_premise.carried_premise.reset();
  EXPECT_SGICL_ERROR(validate_demonstration(rte, no_premise, stops),
                     ErrorKind::kGenerationFailed);

  auto with_stop = d;
  with_stop.generated_text = "two\nlines";
  EXPECT_SGICL_ERROR(validate_demonstration(rte, with_stop, stops),
                     ErrorKind::kGenerationFailed);

  auto bad_class = d;
  bad_class.target_class = 2;
  EXPECT_SGICL_ERROR(validate_demonstration(rte, bad_class, stops),
                     ErrorKind::kGenerationFailed);
}

TEST(Prediction, ArgmaxBreaksTiesTowardLowestClass) {
  EXPECT_EQ(argmax_class(std::vector<double>{-1.0, -0.5, -0.5}), 1u);
  EXPECT_EQ(argmax_class(std::vector<double>{-2.0, -2.0}), 0u);
  EXPECT_EQ(Prediction::from_scores({-3.0, -0.1, -7.0}).predicted, 1u);
  EXPECT_SGICL_ERROR(argmax_class(std::vector<double>{}),
                     ErrorKind::kInvalidArgument);
}

TEST(RunConfig, Validation) {
  RunOptions zero;
  zero.method = Method::kZeroShot;
  zero.k = 0;
  EXPECT_NO_THROW(RunConfig{zero});
  zero.k = 4;
  EXPECT_SGICL_ERROR(RunConfig{zero}, ErrorKind::kConfiguration);

  RunOptions sg;
  sg.k = 0;
  EXPECT_SGICL_ERROR(RunConfig{sg}, ErrorKind::kConfiguration);
  sg.k = 8;
  sg.seeds.clear();
  EXPECT_SGICL_ERROR(RunConfig{sg}, ErrorKind::kConfiguration);

  RunOptions hot;
  hot.sampling.temperature = 0.0;
  EXPECT_SGICL_ERROR(RunConfig{hot}, ErrorKind::kConfiguration);
}

TEST(RunConfig, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.method(), Method::kSgIcl);
  EXPECT_EQ(c.k(), 8u);
  EXPECT_EQ(c.seeds(), (std::vector<std::uint64_t>{0, 1, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(c.sampling().temperature, 0.5);
  EXPECT_EQ(c.conditioning(), ConditioningMode::kInputAndClass);
}

TEST(Enums, RoundTripThroughNames) {
  for (auto m : {Method::kZeroShot, Method::kFewShot, Method::kSgIcl}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  for (auto m : {ConditioningMode::kClassOnly, ConditioningMode::kInputAndClass}) {
    EXPECT_EQ(parse_conditioning_mode(to_string(m)), m);
  }
  for (auto v : {TemplateVariant::kManual, TemplateVariant::kMinimal}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_SGICL_ERROR(parse_method("two-shot"), ErrorKind::kConfiguration);
}

TEST(Errors, KindNamesAreStable) {
  EXPECT_EQ(kind_name(ErrorKind::kCacheIntegrity), "cache-integrity");
  EXPECT_EQ(kind_name(ErrorKind::kRow), "row");
  EXPECT_TRUE(is_configuration_kind(ErrorKind::kConfiguration));
  EXPECT_FALSE(is_configuration_kind(ErrorKind::kTransport));
  const RowError e(ErrorKind::kRow, 7, "bad label");
  EXPECT_EQ(e.line(), 7u);
  EXPECT_STREQ(e.what(), "line 7: bad label");
}
