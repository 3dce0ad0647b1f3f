#include "sgicl/golden.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sgicl/core.hpp"
#include "sgicl/templating.hpp"

namespace sgicl {

std::vector<GoldenRendering> builtin_renderings() {
  std::vector<GoldenRendering> out;
  for (const auto& name : builtin_task_names()) {
    const auto task = builtin_task(name);
    const auto ref = reference_sample(name);
    for (auto variant : {TemplateVariant::kManual, TemplateVariant::kMinimal}) {
      const std::string prefix = name + "." + std::string(to_string(variant));
      out.push_back({prefix + ".demonstration.txt",
                     render_demonstration(task, ref.example,
                                          ref.inference_label, variant)});
      out.push_back(
          {prefix + ".query.txt", render_query(task, ref.example, variant)});
    }
    for (auto mode :
         {ConditioningMode::kInputAndClass, ConditioningMode::kClassOnly}) {
      out.push_back({name + ".generation." + std::string(to_string(mode)) +
                         ".txt",
                     render_generation_prompt(task, ref.example,
                                              ref.generation_label, mode)});
    }
  }
  return out;
}

std::vector<GoldenResult> compare_golden(const std::filesystem::path& dir) {
  std::vector<GoldenResult> results;
  for (const auto& r : builtin_renderings()) {
    GoldenResult res{r.file};
    std::ifstream in(dir / r.file, std::ios::binary);
    if (!in) {
      res.missing = true;
      results.push_back(res);
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string expected = buf.str();
    res.identical = expected == r.bytes;
    if (!res.identical) {
      auto [a, b] = std::mismatch(expected.begin(), expected.end(),
                                  r.bytes.begin(), r.bytes.end());
      res.first_difference =
          static_cast<std::size_t>(std::distance(expected.begin(), a));
    }
    results.push_back(res);
  }
  return results;
}

}  // namespace sgicl
