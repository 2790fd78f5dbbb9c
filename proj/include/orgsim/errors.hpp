#pragma once

#include <stdexcept>
#include <string>

namespace orgsim {

// Invalid parameter or parameter combination supplied by the user
// (config file, CLI flags, file headers).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called outside its stated domain (empty subset,
// out-of-range index, undefined metric).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A structural invariant was violated. Indicates a bug, not user error.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace orgsim
