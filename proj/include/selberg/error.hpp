#pragma once

#include <stdexcept>
#include <string>

namespace selberg {

// Input outside the mathematical domain of an operation (CLI exit code 2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Exhaustive search or enumeration exceeded its configured bound.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A consistency check that should be unreachable failed.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void ensure(bool ok, const std::string& what) {
  if (!ok) throw InternalError(what);
}

}  // namespace selberg
