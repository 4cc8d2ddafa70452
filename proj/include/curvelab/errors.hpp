#pragma once

#include <stdexcept>
#include <string>

namespace curvelab {

enum class ErrorCode : int {
  ok = 0,
  domain = 1,
  precondition = 2,
  coverage = 3,
  degenerate = 4,
  capability = 5,
  construction = 6,
  config = 7,
  io = 8,
  aliasing = 9,
  conditioning = 10,
  numerical = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace curvelab
