#pragma once

#include <stdexcept>
#include <string>

namespace symdyn {

enum class ErrorKind {
  InvalidAlphabet,
  DeadSymbol,
  Domain,
  Unsupported,
  Precondition,
  Refused,
  Budget,
  Schema,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace symdyn
