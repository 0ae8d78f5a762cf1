#pragma once

#include <stdexcept>
#include <string>

namespace modsim {

// Invalid scenario or model parameters.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// File system failures; the message always names the offending path.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace modsim
