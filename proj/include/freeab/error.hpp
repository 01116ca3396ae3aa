#pragma once

#include <stdexcept>
#include <string>

namespace freeab {

enum class ErrorKind {
  Dimension,
  NotCompletable,
  WindowAlignment,
  CompositionUnsupported,
  Argument,
  UnresolvedName,
  Parse,
  Validation,
  Shape,
};

inline auto to_string(ErrorKind k) -> const char * {
  switch (k) {
  case ErrorKind::Dimension: return "dimension";
  case ErrorKind::NotCompletable: return "not-completable";
  case ErrorKind::WindowAlignment: return "window-alignment";
  case ErrorKind::CompositionUnsupported: return "composition-unsupported";
  case ErrorKind::Argument: return "argument";
  case ErrorKind::UnresolvedName: return "unresolved-name";
  case ErrorKind::Parse: return "parse";
  case ErrorKind::Validation: return "validation";
  case ErrorKind::Shape: return "shape";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] auto kind() const noexcept -> ErrorKind { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

} // namespace freeab
