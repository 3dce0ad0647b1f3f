#pragma once

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace sgicl::testing {

inline std::filesystem::path data_dir() { return SGICL_TEST_DATA; }
inline std::filesystem::path fixture(const std::string& name) {
  return data_dir() / "fixtures" / name;
}
inline std::filesystem::path golden(const std::string& name) {
  return data_dir() / "golden" / name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << s;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sgicl-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const {
    return path_ / s;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace sgicl::testing

// Asserts that `stmt` throws sgicl::Error of the given kind.
#define EXPECT_SGICL_ERROR(stmt, expected_kind)                          \
  do {                                                                   \
    try {                                                                \
      stmt;                                                              \
      ADD_FAILURE() << "expected " #expected_kind ", nothing thrown";    \
    } catch (const ::sgicl::Error& e) {                                  \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                    \
    }                                                                    \
  } while (0)
