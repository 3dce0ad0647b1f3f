#include "sgicl/error.hpp"

namespace sgicl {

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInvalidClass: return "invalid-class";
    case ErrorKind::kTemplateResolution: return "template-resolution";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kGenerationFailed: return "generation-failed";
    case ErrorKind::kDegenerateGeneration: return "degenerate-generation";
    case ErrorKind::kScoring: return "scoring";
    case ErrorKind::kUndefinedSimilarity: return "undefined-similarity";
    case ErrorKind::kInput: return "input";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kRow: return "row";
    case ErrorKind::kRowCount: return "row-count";
    case ErrorKind::kCacheIntegrity: return "cache-integrity";
    case ErrorKind::kConfiguration: return "configuration";
  }
  return "unknown";
}

bool is_configuration_kind(ErrorKind kind) {
  return kind == ErrorKind::kConfiguration || kind == ErrorKind::kNotFound;
}

}  // namespace sgicl
