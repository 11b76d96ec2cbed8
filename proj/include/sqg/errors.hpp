#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sqg {

/// Invalid user-supplied configuration. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A ratio whose denominator vanishes identically.
class UndefinedRatioError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace sqg
