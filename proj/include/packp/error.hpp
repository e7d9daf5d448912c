#pragma once

#include <stdexcept>
#include <string>

namespace packp {

/// Failure raised by every module. `code()` is a stable machine-readable tag
/// of the form "<module>/<reason>" that the CLI forwards verbatim.
class Error : public std::runtime_error {
 public:
  enum class Kind { invalid_argument, resource, bracket };

  Error(Kind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  Kind kind_;
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
  throw Error(Error::Kind::invalid_argument, std::move(code), message);
}

[[noreturn]] inline void fail_resource(std::string code, const std::string& message) {
  throw Error(Error::Kind::resource, std::move(code), message);
}

[[noreturn]] inline void fail_bracket(std::string code, const std::string& message) {
  throw Error(Error::Kind::bracket, std::move(code), message);
}

}  // namespace packp
