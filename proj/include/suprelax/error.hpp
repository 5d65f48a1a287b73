#pragma once

#include <stdexcept>
#include <string>

namespace suprelax {

enum class ErrorKind {
  Domain,        // input outside the mathematical domain of an operation
  Resource,      // a configured cap (clique vertices, square count) was exceeded
  Parse,         // malformed expression, CSV or JSON text
  Io,            // file could not be opened or written
  Precondition,  // caller violated a documented precondition
  Internal       // consistency check failed inside the library
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace suprelax
