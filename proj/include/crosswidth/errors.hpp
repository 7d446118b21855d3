#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cw {

enum class ErrorKind {
  Syntax,
  Domain,
  Config,
  Validation,
  Numerical,
  Precondition,
  Topology,
  Internal,
};

// Base of every error raised by the library. `code` is a stable identifier
// such as "NewtonDiverged" that the C API and the CLI report verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& message);

  int line() const noexcept { return line_; }

 private:
  int line_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& code, const std::string& message);

}  // namespace cw
