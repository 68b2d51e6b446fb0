#include "tradenet/core.hpp"

namespace tn {

const char* to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::invalid: return "invalid";
    case SequenceKind::trail: return "trail";
    case SequenceKind::path: return "path";
    case SequenceKind::cycle: return "cycle";
  }
  return "?";
}

}  // namespace tn
