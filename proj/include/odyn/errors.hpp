#ifndef ODYN_ERRORS_HPP
#define ODYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace odyn {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// argument outside the domain of a map or operation
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// a numerical procedure failed to converge or produced an unusable value
struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

// exact cross-check requested on a system that does not admit one
struct OracleUnavailable : Error {
  explicit OracleUnavailable(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace odyn

#endif
