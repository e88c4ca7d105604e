#pragma once

#include <stdexcept>
#include <string>

namespace llab {

enum class ErrorKind {
  Parse = 2,
  DegreeOverflow = 3,
  OrderOverflow = 4,
  CapExceeded = 5,
  InvalidInput = 6,
  FileError = 7,
  Violation = 8,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::DegreeOverflow: return "degree overflow";
    case ErrorKind::OrderOverflow: return "order overflow";
    case ErrorKind::CapExceeded: return "cap exceeded";
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::FileError: return "file error";
    case ErrorKind::Violation: return "theorem violation";
  }
  return "error";
}

class LabError : public std::runtime_error {
 public:
  LabError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace llab
