#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sgicl {

/// One rendering of a built-in task's reference sample, named by the golden
/// fixture file it must match:
///
///   <task>.<manual|minimal>.<demonstration|query>.txt
///   <task>.generation.<input-and-class|class-only>.txt
struct GoldenRendering {
  std::string file;
  std::string bytes;
};

std::vector<GoldenRendering> builtin_renderings();

struct GoldenResult {
  std::string file;
  bool missing = false;
  bool identical = false;
  std::size_t first_difference = 0;  // byte offset, when not identical
};

/// Byte-compares every built-in rendering with the file of the same name in
/// `dir`.
std::vector<GoldenResult> compare_golden(const std::filesystem::path& dir);

}  // namespace sgicl
