#include "capsim/errors.hpp"

#include <sstream>

namespace capsim {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i];
  }
  return os.str();
}

std::string with_line(const std::string& message, int line) {
  if (line <= 0) return message;
  return "line " + std::to_string(line) + ": " + message;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(with_line(message, line)), line_(line) {}

StabilityFault::StabilityFault(const std::string& what, std::uint64_t tick, std::size_t stratum)
    : std::runtime_error(what + " (tick " + std::to_string(tick) + ", stratum " + std::to_string(stratum) + ")"),
      tick_(tick),
      stratum_(stratum) {}

}  // namespace capsim
