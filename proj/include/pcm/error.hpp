#pragma once

#include <stdexcept>
#include <string>

namespace pcm {

// Bad caller input: malformed files, out-of-range arguments, violated
// preconditions. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input parsed but its content is unusable (bad syntax, wrong counts).
// `line` is 1-based, 0 when the error is not tied to a line.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : InputError(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The auction ran out of its bid budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pcm
