#include "symdyn/error.hpp"

namespace symdyn {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidAlphabet: return "invalid-alphabet";
    case ErrorKind::DeadSymbol: return "dead-symbol";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Refused: return "refused";
    case ErrorKind::Budget: return "budget-exceeded";
    case ErrorKind::Schema: return "schema";
  }
  return "error";
}

}  // namespace symdyn
