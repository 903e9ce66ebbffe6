#pragma once

#include <stdexcept>
#include <string>

namespace torpass {

/// Bad run configuration or malformed input file. CLI maps this to exit 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver failed to converge or a hard numerical gate was violated.
/// CLI maps this to exit 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace torpass
