#pragma once

#include <stdexcept>
#include <string>

namespace siadmm {

// Invalid inputs: dimensions, constants, configuration. CLI maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, singular systems, overflow. CLI maps to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace siadmm
