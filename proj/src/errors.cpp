#include "shadowlab/errors.hpp"

namespace shadowlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::degenerate_body: return "degenerate-body";
    case ErrorKind::inconclusive_distance: return "inconclusive-distance";
    case ErrorKind::resource: return "resource";
    case ErrorKind::construction_failed: return "construction-failed";
    case ErrorKind::search_failed: return "search-failed";
    case ErrorKind::escape_not_found: return "escape-not-found";
    case ErrorKind::dependency: return "dependency";
  }
  return "unknown";
}

}  // namespace shadowlab
