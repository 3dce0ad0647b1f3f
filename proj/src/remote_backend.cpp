#include "sgicl/remote_backend.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>

namespace sgicl {
namespace {

using nlohmann::json;

const json& first_choice(const json& response) {
  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    throw Error(ErrorKind::kScoring, "response has no choices");
  }
  return response["choices"][0];
}

}  // namespace

json completion_request(const RemoteOptions& o, std::string_view prompt,
                        const SamplingConfig& sampling, std::uint64_t seed) {
  json body = {
      {"prompt", std::string(prompt)},
      {"max_tokens", sampling.max_new_tokens},
      {"temperature", sampling.temperature},
      {"stop", sampling.stop_sequences},
      {"seed", seed},
  };
  if (!o.model.empty()) body["model"] = o.model;
  return body;
}

json echo_scoring_request(const RemoteOptions& o, std::string_view prompt,
                          std::string_view candidate) {
  std::string text(prompt);
  text += candidate;
  json body = {
      {"prompt", text},
      {"max_tokens", 0},
      {"temperature", 0.0},
      {"echo", true},
      {"logprobs", 1},
  };
  if (!o.model.empty()) body["model"] = o.model;
  return body;
}

std::pair<double, std::size_t> candidate_logprob_from_echo(
    const json& response, std::size_t prompt_bytes,
    std::string_view candidate) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorKind::kScoring, "cannot score candidate '" +
                                          std::string(candidate) + "': " + why);
  };
  const json* lp = nullptr;
  try {
    lp = &first_choice(response).at("logprobs");
  } catch (const std::exception&) {
    throw fail("response carries no logprobs");
  }
  if (!lp->contains("tokens") || !lp->contains("token_logprobs") ||
      !lp->contains("text_offset")) {
    throw fail("logprobs lack tokens/token_logprobs/text_offset");
  }
  const auto& tokens = (*lp)["tokens"];
  const auto& logprobs = (*lp)["token_logprobs"];
  const auto& offsets = (*lp)["text_offset"];
  const std::size_t n = tokens.size();
  if (logprobs.size() != n || offsets.size() != n) {
    throw fail("logprob arrays have different lengths");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto start = offsets[i].get<std::size_t>();
    const auto end = (i + 1 < n) ? offsets[i + 1].get<std::size_t>()
                                 : start + tokens[i].get<std::string>().size();
    if (end <= prompt_bytes) continue;
    if (logprobs[i].is_null()) throw fail("token has no logprob");
    sum += logprobs[i].get<double>();
    ++count;
  }
  if (count == 0) throw fail("no echoed tokens cover the candidate");
  return {sum, count};
}

RemoteBackend::RemoteBackend(RemoteOptions options) : o_(std::move(options)) {
  if (o_.endpoint.empty()) {
    throw Error(ErrorKind::kConfiguration, "remote backend needs an endpoint");
  }
  if (o_.embedding_model.empty()) o_.embedding_model = o_.model;
  id_ = "remote:" + o_.endpoint + "#" + o_.model;
}

json RemoteBackend::post(const std::string& path, const json& body,
                         bool for_generation) const {
  httplib::Client client(o_.endpoint);
  client.set_connection_timeout(o_.timeout);
  client.set_read_timeout(o_.timeout);
  client.set_write_timeout(o_.timeout);
  httplib::Headers headers;
  if (!o_.auth_env.empty()) {
    if (const char* token = std::getenv(o_.auth_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + o_.endpoint + path + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("POST " + o_.endpoint + path + " returned HTTP " +
                         std::to_string(res->status));
  }
  if (res->status != 200) {
    const std::string msg = "HTTP " + std::to_string(res->status) + ": " +
                            res->body.substr(0, 200);
    if (for_generation) throw RefusalError(msg);
    throw Error(ErrorKind::kScoring, msg);
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed response body: ") + e.what());
  }
}

std::string RemoteBackend::raw_complete(std::string_view prompt,
                                        const SamplingConfig& sampling,
                                        std::uint64_t seed) {
  auto response = post(o_.completions_path,
                       completion_request(o_, prompt, sampling, seed), true);
  try {
    return first_choice(response).at("text").get<std::string>();
  } catch (const std::exception& e) {
    throw RefusalError(std::string("completion response without text: ") +
                       e.what());
  }
}

std::vector<double> RemoteBackend::raw_score(
    std::string_view prompt, std::span<const std::string> candidates) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& candidate : candidates) {
    if (o_.scoring == ScoringMode::kEcho) {
      auto response = post(o_.completions_path,
                           echo_scoring_request(o_, prompt, candidate), false);
      auto [sum, count] =
          candidate_logprob_from_echo(response, prompt.size(), candidate);
      scores.push_back(o_.mean_normalize ? sum / static_cast<double>(count)
                                         : sum);
      continue;
    }
    json body = {{"prompt", std::string(prompt)},
                 {"max_tokens", 1},
                 {"temperature", 0.0},
                 {"logprobs", o_.top_logprobs}};
    if (!o_.model.empty()) body["model"] = o_.model;
    auto response = post(o_.completions_path, body, false);
    const json* top = nullptr;
    try {
      top = &first_choice(response).at("logprobs").at("top_logprobs").at(0);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kScoring,
                  "cannot score candidate '" + candidate +
                      "': response has no top_logprobs");
    }
    std::optional<double> found;
    for (const auto& [token, value] : top->items()) {
      if (token == candidate || token == " " + candidate) {
        found = value.get<double>();
        break;
      }
    }
    if (!found) {
      throw Error(ErrorKind::kScoring,
                  "cannot score candidate '" + candidate +
                      "': not among the top " +
                      std::to_string(o_.top_logprobs) + " next tokens");
    }
    scores.push_back(*found);
  }
  return scores;
}

std::vector<double> RemoteBackend::raw_embed(std::string_view text) {
  json body = {{"input", std::string(text)}};
  if (!o_.embedding_model.empty()) body["model"] = o_.embedding_model;
  auto response = post(o_.embeddings_path, body, false);
  try {
    return response.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kInput,
                std::string("embedding response malformed: ") + e.what());
  }
}

}  // namespace sgicl
