#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace capsim {

/// Configuration or capsule invariants violated. Carries every issue found, not just the first.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(std::vector<std::string> issues);
  explicit ValidationError(const std::string& issue) : ValidationError(std::vector<std::string>{issue}) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
  std::vector<std::string> issues_;
};

/// Malformed configuration text. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& message, int line);
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Explicit update produced a concentration below the negativity tolerance.
class StabilityFault : public std::runtime_error {
public:
  StabilityFault(const std::string& what, std::uint64_t tick, std::size_t stratum);
  std::uint64_t tick() const noexcept { return tick_; }
  std::size_t stratum() const noexcept { return stratum_; }

private:
  std::uint64_t tick_;
  std::size_t stratum_;
};

}  // namespace capsim
