#include "sgicl/cache.hpp"

#include <unistd.h>

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sgicl/error.hpp"
#include "sgicl/hash.hpp"
#include "sgicl/records.hpp"

namespace sgicl {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shortest(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

std::string unique_suffix() {
  static std::atomic<std::uint64_t> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  return std::to_string(::getpid()) + "-" + std::to_string(tid) + "-" +
         std::to_string(counter++);
}

}  // namespace

std::string CacheKey::canonical() const {
  return json::array({"sgicl-cache-v1", task, example_id, target_class,
                      std::string(to_string(mode)), shortest(temperature),
                      seed, template_hash, backend_id})
      .dump();
}

std::string CacheKey::digest() const { return sha256_hex(canonical()); }

GenerationCache::GenerationCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw Error(ErrorKind::kConfiguration,
                "cannot create cache directory " + dir_.string());
  }
}

fs::path GenerationCache::record_path(const CacheKey& key) const {
  const auto d = key.digest();
  return dir_ / d.substr(0, 2) / (d + ".json");
}

void GenerationCache::quarantine(const fs::path& path) const {
  std::error_code ec;
  fs::create_directories(dir_ / "quarantine", ec);
  fs::rename(path,
             dir_ / "quarantine" /
                 (path.filename().string() + "." + unique_suffix()),
             ec);
}

std::optional<GeneratedDemonstration> GenerationCache::get(
    const CacheKey& key) const {
  const auto path = record_path(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  in.close();
  auto corrupt = [&](const std::string& why) {
    quarantine(path);
    return Error(ErrorKind::kCacheIntegrity,
                 "cache record " + path.filename().string() + ": " + why);
  };
  json record;
  try {
    record = json::parse(buf.str());
  } catch (const json::exception&) {
    throw corrupt("not valid JSON");
  }
  if (!record.is_object() || !record.contains("key") ||
      !record.contains("value") || !record.contains("checksum")) {
    throw corrupt("missing fields");
  }
  if (record["key"] != key.canonical()) throw corrupt("key mismatch");
  if (record["checksum"] != sha256_hex(record["value"].dump())) {
    throw corrupt("checksum mismatch");
  }
  GeneratedDemonstration demo;
  try {
    demo = demonstration_from_json(record["value"]);
  } catch (const Error& e) {
    throw corrupt(e.what());
  }
  if (demo.generated_text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw corrupt("empty generated text");
  }
  ++hits_;
  return demo;
}

void GenerationCache::put(const CacheKey& key,
                          const GeneratedDemonstration& value) {
  const auto path = record_path(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const json body = to_json(value);
  const json record = {{"key", key.canonical()},
                       {"value", body},
                       {"checksum", sha256_hex(body.dump())}};
  const auto tmp = path.parent_path() / (".tmp-" + unique_suffix());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << record.dump() << '\n';
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorKind::kCacheIntegrity,
                  "cannot write cache record " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::kCacheIntegrity,
                "cannot publish cache record " + path.string());
  }
  ++puts_;
}

}  // namespace sgicl
