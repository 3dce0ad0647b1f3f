#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "sgicl/remote_backend.hpp"
#include "test_util.hpp"

using namespace sgicl;
using nlohmann::json;

namespace {

// Splits before every space, so " positive" is one token.
std::vector<std::string> toy_tokens(const std::string& text) {
  std::vector<std::string> out;
  for (char c : text) {
    if (out.empty() || c == ' ') out.emplace_back();
    out.back().push_back(c);
  }
  return out;
}

double toy_logprob(const std::string& token) {
  return -0.1 * static_cast<double>(token.size());
}

// Minimal OpenAI-style completions/embeddings server on a loopback port.
class FakeServer {
 public:
  FakeServer() {
    server_.Post("/v1/completions", [this](const httplib::Request& req,
                                           httplib::Response& res) {
      const auto body = json::parse(req.body);
      {
        std::lock_guard lock(mu_);
        requests_.push_back(body);
        auth_ = req.get_header_value("Authorization");
      }
      if (body.value("echo", false)) {
        const auto text = body["prompt"].get<std::string>();
        json tokens = json::array(), lps = json::array(), offsets = json::array();
        std::size_t offset = 0;
        bool first = true;
        for (const auto& t : toy_tokens(text)) {
          tokens.push_back(t);
          lps.push_back(first ? json(nullptr) : json(toy_logprob(t)));
          offsets.push_back(offset);
          offset += t.size();
          first = false;
        }
        res.set_content(json{{"choices",
                              {{{"text", text},
                                {"logprobs",
                                 {{"tokens", tokens},
                                  {"token_logprobs", lps},
                                  {"text_offset", offsets}}}}}}}
                            .dump(),
                        "application/json");
        return;
      }
      if (body.contains("logprobs")) {
        res.set_content(
            json{{"choices",
                  {{{"text", " positive"},
                    {"logprobs",
                     {{"top_logprobs",
                       {{{" positive", -0.3}, {" negative", -1.2}}}}}}}}}}
                .dump(),
            "application/json");
        return;
      }
      if (body["prompt"] == "refuse me") {
        res.status = 400;
        res.set_content("content policy", "text/plain");
        return;
      }
      res.set_content(
          json{{"choices", {{{"text", " a lovely film .\nReview :"}}}}}.dump(),
          "application/json");
    });
    server_.Post("/flaky", [this](const httplib::Request&, httplib::Response& res) {
      if (++flaky_calls_ <= 2) {
        res.status = 503;
        return;
      }
      res.set_content(json{{"choices", {{{"text", "recovered"}}}}}.dump(),
                      "application/json");
    });
    server_.Post("/down", [this](const httplib::Request&, httplib::Response& res) {
      ++flaky_calls_;
      res.status = 500;
    });
    server_.Post("/v1/embeddings", [](const httplib::Request& req,
                                      httplib::Response& res) {
      const auto body = json::parse(req.body);
      res.set_content(
          json{{"data", {{{"embedding", {3.0, 4.0}}}}},
               {"model", body.value("model", "")}}
              .dump(),
          "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  RemoteOptions options() const {
    RemoteOptions o;
    o.endpoint = "http://127.0.0.1:" + std::to_string(port_);
    o.model = "toy-lm";
    o.backoff = std::chrono::milliseconds(1);
    o.timeout = std::chrono::seconds(10);
    return o;
  }
  json last_request() {
    std::lock_guard lock(mu_);
    return requests_.back();
  }
  std::string auth() {
    std::lock_guard lock(mu_);
    return auth_;
  }
  int flaky_calls() const { return flaky_calls_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::vector<json> requests_;
  std::string auth_;
  std::atomic<int> flaky_calls_{0};
};

}  // namespace

TEST(RemoteBackend, CompletionRequestAndStopTruncation) {
  FakeServer server;
  ::setenv("SGICL_TEST_TOKEN", "s3cret", 1);
  auto o = server.options();
  o.auth_env = "SGICL_TEST_TOKEN";
  RemoteBackend backend(o);
  SamplingConfig sampling;
  sampling.max_new_tokens = 32;
  EXPECT_EQ(complete(backend, "Generate a review : ", sampling, 42),
            " a lovely film .");
  const auto req = server.last_request();
  EXPECT_EQ(req["prompt"], "Generate a review : ");
  EXPECT_EQ(req["max_tokens"], 32);
  EXPECT_DOUBLE_EQ(req["temperature"].get<double>(), 0.5);
  EXPECT_EQ(req["stop"], json::array({"\n"}));
  EXPECT_EQ(req["seed"], 42);
  EXPECT_EQ(req["model"], "toy-lm");
  EXPECT_EQ(server.auth(), "Bearer s3cret");
  EXPECT_EQ(backend.id(), "remote:" + o.endpoint + "#toy-lm");
}

TEST(RemoteBackend, EchoScoringCountsOnlyCandidateTokens) {
  FakeServer server;
  RemoteBackend backend(server.options());
  const std::string prompt = "Review : good film .\nSentiment : ";
  const std::vector<std::string> words{"positive", "negative"};
  const auto scores = score_continuations(backend, prompt, words);
  // The prompt's trailing space and the word form one toy token (" positive",
  // 9 bytes), which straddles the boundary and counts toward the candidate.
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_DOUBLE_EQ(scores[0], -0.9);
  EXPECT_DOUBLE_EQ(scores[1], -0.9);
  const auto req = server.last_request();
  EXPECT_EQ(req["prompt"], prompt + "negative");
  EXPECT_EQ(req["echo"], true);
  EXPECT_EQ(req["max_tokens"], 0);
}

TEST(RemoteBackend, EchoScoringMultiTokenCandidate) {
  FakeServer server;
  auto o = server.options();
  RemoteBackend sum_backend(o);
  o.mean_normalize = true;
  RemoteBackend mean_backend(o);
  const std::vector<std::string> words{" very good"};
  // Tokens after the boundary: " very" (5 bytes) and " good" (5 bytes).
  EXPECT_DOUBLE_EQ(score_continuations(sum_backend, "x :", words)[0], -1.0);
  EXPECT_DOUBLE_EQ(score_continuations(mean_backend, "x :", words)[0], -0.5);
}

TEST(RemoteBackend, ContinuationScoringReadsTopLogprobs) {
  FakeServer server;
  auto o = server.options();
  o.scoring = ScoringMode::kContinuation;
  RemoteBackend backend(o);
  const std::vector<std::string> words{"positive", "negative"};
  EXPECT_EQ(score_continuations(backend, "Sentiment :", words),
            (std::vector<double>{-0.3, -1.2}));
  EXPECT_SGICL_ERROR(
      score_continuations(backend, "Sentiment :", std::vector<std::string>{"neutral"}),
      ErrorKind::kScoring);
}

TEST(RemoteBackend, RetriesServerErrors) {
  FakeServer server;
  auto o = server.options();
  o.completions_path = "/flaky";
  RemoteBackend backend(o);
  SamplingConfig sampling;
  sampling.retry_limit = 3;
  EXPECT_EQ(complete(backend, "p", sampling, 0), "recovered");
  EXPECT_EQ(server.flaky_calls(), 3);
}

TEST(RemoteBackend, PersistentServerErrorIsTransport) {
  FakeServer server;
  auto o = server.options();
  o.completions_path = "/down";
  RemoteBackend backend(o);
  SamplingConfig sampling;
  sampling.retry_limit = 1;
  EXPECT_SGICL_ERROR(complete(backend, "p", sampling, 0), ErrorKind::kTransport);
  EXPECT_EQ(server.flaky_calls(), 2);
}

TEST(RemoteBackend, ClientErrorOnGenerationIsRefusal) {
  FakeServer server;
  RemoteBackend backend(server.options());
  EXPECT_SGICL_ERROR(complete(backend, "refuse me", SamplingConfig{}, 0),
                     ErrorKind::kGenerationFailed);
}

TEST(RemoteBackend, UnreachableEndpointIsTransport) {
  RemoteOptions o;
  o.endpoint = "http://127.0.0.1:1";
  o.backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(2);
  RemoteBackend backend(o);
  SamplingConfig sampling;
  sampling.retry_limit = 0;
  EXPECT_SGICL_ERROR(complete(backend, "p", sampling, 0), ErrorKind::kTransport);
}

TEST(RemoteBackend, EmbeddingsAreNormalized) {
  FakeServer server;
  auto o = server.options();
  o.embedding_model = "toy-embed";
  RemoteBackend backend(o);
  const auto v = embed(backend, "text");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_DOUBLE_EQ(v[0], 0.6);
  EXPECT_DOUBLE_EQ(v[1], 0.8);
}

TEST(RemoteBackend, EchoParserRejectsMissingLogprobs) {
  const json bad = {{"choices", {{{"text", "x"}}}}};
  EXPECT_SGICL_ERROR(candidate_logprob_from_echo(bad, 1, "x"), ErrorKind::kScoring);
}

TEST(RemoteBackend, NeedsEndpoint) {
  EXPECT_SGICL_ERROR(RemoteBackend(RemoteOptions{}), ErrorKind::kConfiguration);
}
