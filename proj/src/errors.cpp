#include "crosswidth/errors.hpp"

namespace cw {

Error::Error(ErrorKind kind, std::string code, const std::string& message)
    : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

SyntaxError::SyntaxError(std::size_t offset, std::string expected)
    : Error(ErrorKind::Syntax, "SyntaxError",
            "syntax error at offset " + std::to_string(offset) + ": " + expected),
      offset_(offset),
      expected_(std::move(expected)) {}

ConfigError::ConfigError(int line, const std::string& message)
    : Error(ErrorKind::Config, "ConfigError",
            line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

void fail(ErrorKind kind, const std::string& code, const std::string& message) {
  throw Error(kind, code, message);
}

}  // namespace cw
