#include "scmnet/error.hpp"

namespace scmnet {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::AllZeroMatrix: return "AllZeroMatrix";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::AllZeroSet: return "AllZeroSet";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace scmnet
