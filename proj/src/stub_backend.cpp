#include "sgicl/stub_backend.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sgicl/hash.hpp"

namespace sgicl {
namespace {

constexpr std::array<std::string_view, 24> kVocabulary = {
    "the",   "film",  "story", "is",     "a",      "quiet",
    "sharp", "slow",  "warm",  "messy",  "bright", "tale",
    "with",  "cast",  "and",   "plot",   "that",   "never",
    "quite", "lands", "works", "moving", "dull",   "fun"};

double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::string synthetic_completion(std::string_view prompt, std::uint64_t seed) {
  std::uint64_t state = derive_seed(seed, {hash_string(prompt)});
  const std::size_t words = 4 + (state % 7);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    state = mix64(state);
    if (!out.empty()) out.push_back(' ');
    out += kVocabulary[state % kVocabulary.size()];
  }
  out += " .";
  return out;
}

double synthetic_score(std::string_view prompt, std::string_view candidate) {
  const std::uint64_t bits =
      derive_seed(hash_string(prompt), {hash_string(candidate)});
  return -(0.05 + 7.95 * unit_interval(bits));
}

std::vector<double> synthetic_embedding(std::string_view text,
                                        std::size_t dim) {
  std::vector<double> v(dim);
  std::uint64_t state = hash_string(text);
  for (auto& x : v) {
    state = mix64(state);
    x = 2.0 * unit_interval(state) - 1.0;
  }
  return v;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& why) {
  throw Error(ErrorKind::kConfiguration,
              "stub script line " + std::to_string(line) + ": " + why);
}

double parse_double(std::string_view w, std::size_t line_no) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
  if (ec != std::errc() || ptr != w.data() + w.size()) {
    parse_fail(line_no, "bad number '" + std::string(w) + "'");
  }
  return x;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

// Token reader over one record line. JSON string tokens are decoded with
// nlohmann::json so escapes follow JSON rules.
class LineReader {
 public:
  LineReader(std::string_view line, std::size_t line_no)
      : line_(line), no_(line_no) {}

  bool done() {
    skip_ws();
    return pos_ >= line_.size();
  }

  std::string_view word() {
    skip_ws();
    if (pos_ >= line_.size()) parse_fail(no_, "missing field");
    const auto start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t') {
      ++pos_;
    }
    return line_.substr(start, pos_ - start);
  }

  std::string quoted() {
    skip_ws();
    if (pos_ >= line_.size() || line_[pos_] != '"') {
      parse_fail(no_, "expected a quoted string");
    }
    std::size_t end = pos_ + 1;
    while (end < line_.size() && line_[end] != '"') {
      end += (line_[end] == '\\') ? 2 : 1;
    }
    if (end >= line_.size()) parse_fail(no_, "unterminated string");
    try {
      auto s = nlohmann::json::parse(line_.substr(pos_, end - pos_ + 1))
                   .get<std::string>();
      pos_ = end + 1;
      return s;
    } catch (const nlohmann::json::exception& e) {
      parse_fail(no_, e.what());
    }
  }

  double number() { return parse_double(word(), no_); }

  std::uint64_t unsigned_number() {
    auto w = word();
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      parse_fail(no_, "bad integer '" + std::string(w) + "'");
    }
    return x;
  }

  StubScript::SeedKey seed() {
    skip_ws();
    if (pos_ < line_.size() && line_[pos_] == '*') {
      ++pos_;
      return std::nullopt;
    }
    return unsigned_number();
  }

  std::string fingerprint_field() {
    auto w = word();
    if (w.size() != 16 ||
        w.find_first_not_of("0123456789abcdef") != std::string_view::npos) {
      parse_fail(no_, "expected a 16-char hex fingerprint");
    }
    return std::string(w);
  }

 private:
  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) {
      ++pos_;
    }
  }

  std::string_view line_;
  std::size_t no_;
  std::size_t pos_ = 0;
};

std::string seed_text(const StubScript::SeedKey& s) {
  return s ? std::to_string(*s) : "*";
}

std::string json_quote(const std::string& s) {
  return nlohmann::json(s).dump();
}

}  // namespace

void StubScript::add_completion(std::string_view prompt, SeedKey seed,
                                std::string text) {
  completions[{fingerprint(prompt), seed}] = std::move(text);
}

void StubScript::add_refusal(std::string_view prompt, SeedKey seed) {
  refusals.insert({fingerprint(prompt), seed});
}

void StubScript::add_score(std::string_view prompt, std::string candidate,
                           double logprob) {
  if (!std::isfinite(logprob) || logprob > 0.0) {
    throw Error(ErrorKind::kConfiguration,
                "stub log-probabilities must be finite and <= 0");
  }
  scores[{fingerprint(prompt), std::move(candidate)}] = logprob;
}

void StubScript::add_embedding(std::string_view text,
                               std::vector<double> vector) {
  embeddings[fingerprint(text)] = std::move(vector);
}

StubScript StubScript::parse(std::string_view text) {
  StubScript script;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    LineReader r(line, line_no);
    if (r.done()) continue;
    auto head = r.word();
    if (head.starts_with('#')) continue;
    if (head == "id") {
      script.id = r.quoted();
    } else if (head == "default_score") {
      auto w = r.word();
      if (w == "synthetic") {
        script.default_score.reset();
      } else {
        double d = parse_double(w, line_no);
        if (!std::isfinite(d) || d > 0.0) parse_fail(line_no, "score > 0");
        script.default_score = d;
      }
    } else if (head == "completions") {
      auto mode = r.word();
      if (mode == "synthetic") {
        script.synthetic_completions = true;
      } else if (mode == "none") {
        script.synthetic_completions = false;
      } else {
        parse_fail(line_no, "completions must be synthetic or none");
      }
    } else if (head == "embedding_dim") {
      script.embedding_dim = r.unsigned_number();
      if (script.embedding_dim == 0) parse_fail(line_no, "embedding_dim is 0");
    } else if (head == "complete") {
      auto fp = r.fingerprint_field();
      auto seed = r.seed();
      script.completions[{fp, seed}] = r.quoted();
    } else if (head == "refuse") {
      auto fp = r.fingerprint_field();
      script.refusals.insert({fp, r.seed()});
    } else if (head == "score") {
      auto fp = r.fingerprint_field();
      auto cand = r.quoted();
      double lp = r.number();
      if (!std::isfinite(lp) || lp > 0.0) parse_fail(line_no, "score > 0");
      script.scores[{fp, cand}] = lp;
    } else if (head == "embed") {
      auto fp = r.fingerprint_field();
      std::vector<double> v;
      while (!r.done()) v.push_back(r.number());
      if (v.empty()) parse_fail(line_no, "empty embedding");
      script.embeddings[fp] = std::move(v);
    } else if (head == "transport_fail") {
      auto fp = r.fingerprint_field();
      script.transport_failures[fp] = r.unsigned_number();
    } else {
      parse_fail(line_no, "unknown record '" + std::string(head) + "'");
    }
    if (!r.done()) parse_fail(line_no, "trailing fields");
  }
  return script;
}

StubScript StubScript::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kConfiguration,
                "cannot open stub script " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string StubScript::serialize() const {
  std::ostringstream out;
  out << "id " << json_quote(id) << '\n';
  out << "default_score "
      << (default_score ? format_double(*default_score) : "synthetic") << '\n';
  out << "completions " << (synthetic_completions ? "synthetic" : "none")
      << '\n';
  out << "embedding_dim " << embedding_dim << '\n';
  for (const auto& [key, text] : completions) {
    out << "complete " << key.first << ' ' << seed_text(key.second) << ' '
        << json_quote(text) << '\n';
  }
  for (const auto& key : refusals) {
    out << "refuse " << key.first << ' ' << seed_text(key.second) << '\n';
  }
  for (const auto& [key, lp] : scores) {
    out << "score " << key.first << ' ' << json_quote(key.second) << ' '
        << format_double(lp) << '\n';
  }
  for (const auto& [fp, v] : embeddings) {
    out << "embed " << fp;
    for (double x : v) out << ' ' << format_double(x);
    out << '\n';
  }
  for (const auto& [fp, n] : transport_failures) {
    out << "transport_fail " << fp << ' ' << n << '\n';
  }
  return out.str();
}

StubBackend::StubBackend(StubScript script)
    : script_(std::move(script)), failures_left_(script_.transport_failures) {}

void StubBackend::reset_counters() noexcept {
  completion_calls_ = 0;
  score_calls_ = 0;
  embed_calls_ = 0;
}

std::string StubBackend::raw_complete(std::string_view prompt,
                                      const SamplingConfig& /*sampling*/,
                                      std::uint64_t seed) {
  ++completion_calls_;
  const std::string fp = fingerprint(prompt);
  {
    std::lock_guard lock(failures_mu_);
    if (auto it = failures_left_.find(fp);
        it != failures_left_.end() && it->second > 0) {
      --it->second;
      throw TransportError("scripted transport failure for " + fp);
    }
  }
  for (const StubScript::SeedKey key : {StubScript::SeedKey(seed),
                                        StubScript::SeedKey()}) {
    if (script_.refusals.contains({fp, key})) {
      throw RefusalError("scripted refusal for " + fp);
    }
    if (auto it = script_.completions.find({fp, key});
        it != script_.completions.end()) {
      return it->second;
    }
  }
  return script_.synthetic_completions ? synthetic_completion(prompt, seed)
                                       : std::string();
}

std::vector<double> StubBackend::raw_score(
    std::string_view prompt, std::span<const std::string> candidates) {
  ++score_calls_;
  const std::string fp = fingerprint(prompt);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (auto it = script_.scores.find({fp, c}); it != script_.scores.end()) {
      out.push_back(it->second);
    } else if (script_.default_score) {
      out.push_back(*script_.default_score);
    } else {
      out.push_back(synthetic_score(prompt, c));
    }
  }
  return out;
}

std::vector<double> StubBackend::raw_embed(std::string_view text) {
  ++embed_calls_;
  if (auto it = script_.embeddings.find(fingerprint(text));
      it != script_.embeddings.end()) {
    return it->second;
  }
  return synthetic_embedding(text, script_.embedding_dim);
}

}  // namespace sgicl
