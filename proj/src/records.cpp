#include "sgicl/records.hpp"

#include "sgicl/error.hpp"

namespace sgicl {

using nlohmann::json;

json to_json(const GeneratedDemonstration& demo) {
  json j = {
      {"source_example_id", demo.source_example_id},
      {"target_class", demo.target_class},
      {"generated_text", demo.generated_text},
      {"conditioning_mode", std::string(to_string(demo.conditioning_mode))},
      {"provenance",
       {{"backend_id", demo.provenance.backend_id},
        {"seed", demo.provenance.seed},
        {"template_hash", demo.provenance.template_hash}}},
  };
  if (demo.carried_premise) j["carried_premise"] = *demo.carried_premise;
  return j;
}

GeneratedDemonstration demonstration_from_json(const json& j) {
  try {
    GeneratedDemonstration d;
    d.source_example_id = j.at("source_example_id").get<std::string>();
    d.target_class = j.at("target_class").get<ClassId>();
    d.generated_text = j.at("generated_text").get<std::string>();
    d.conditioning_mode =
        parse_conditioning_mode(j.at("conditioning_mode").get<std::string>());
    if (j.contains("carried_premise")) {
      d.carried_premise = j["carried_premise"].get<std::string>();
    }
    const auto& p = j.at("provenance");
    d.provenance.backend_id = p.at("backend_id").get<std::string>();
    d.provenance.seed = p.at("seed").get<std::uint64_t>();
    d.provenance.template_hash = p.at("template_hash").get<std::string>();
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCacheIntegrity,
                std::string("malformed demonstration record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::kCacheIntegrity,
                std::string("malformed demonstration record: ") + e.what());
  }
}

json to_json(const Example& example) {
  json j = {{"id", example.id}, {"text1", example.text1}};
  if (example.text2) j["text2"] = *example.text2;
  if (example.gold) j["gold"] = *example.gold;
  return j;
}

json to_json(const TaskSpec& task, const Demonstration& demo) {
  json j = {{"label", task.verbalizer(demo.label)}};
  if (const auto* gen = std::get_if<GeneratedDemonstration>(&demo.item)) {
    j["kind"] = "generated";
    if (gen->carried_premise) j["text1"] = *gen->carried_premise;
    j[gen->carried_premise ? "text2" : "text1"] = gen->generated_text;
    j["seed"] = gen->provenance.seed;
  } else {
    const auto& ex = std::get<Example>(demo.item);
    j["kind"] = "gold";
    j["id"] = ex.id;
    j["text1"] = ex.text1;
    if (ex.text2) j["text2"] = *ex.text2;
  }
  return j;
}

json to_json(const TaskSpec& task, const Prediction& prediction) {
  json scores = json::object();
  for (ClassId c = 0; c < prediction.scores.size(); ++c) {
    scores[task.verbalizer(c)] = prediction.scores[c];
  }
  return {{"scores", scores},
          {"predicted", task.verbalizer(prediction.predicted)}};
}

}  // namespace sgicl
