#pragma once

#include <stdexcept>
#include <string>

namespace botsense {

// Base for every failure the library reports. `category` is a short
// machine-readable tag (e.g. "config", "schema", "io") used by the CLI to
// pick an exit code and prefix diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

}  // namespace botsense
