// Exception types shared by every module.
#pragma once

#include <stdexcept>
#include <string>

namespace sdnft {

// Invalid user-supplied configuration (scenario files, parameters).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sdnft
