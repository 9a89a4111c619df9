#pragma once

#include <stdexcept>
#include <string>

namespace chollag {

/// Error categories surfaced through the C API as status codes.
enum class ErrorCode : int {
  invalid_argument = 1,
  config = 2,
  solver = 3,
  io = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorCode::invalid_argument, what); }

}  // namespace chollag
