#pragma once

#include <stdexcept>
#include <string>

namespace scmnet {

enum class ErrorKind {
  BadShape,
  AllZeroMatrix,
  SupportViolation,
  EmptySet,
  AllZeroSet,
  BadConfig,
  UnknownLabel,
  MissingCell,
  MalformedRecord,
  SelfLoop,
  EmptyInput,
  EmptyWindow,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace scmnet
