#pragma once

#include <stdexcept>
#include <string>

namespace bglue {

/// Point or argument outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A value would leave the representable range (e.g. log-magnitude overflow).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Operation not available for this node kind (e.g. inverse without a closed form).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A construction step failed a certificate (monotonicity, collar depth, ...).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-side precondition failed at run time (e.g. map does not fix the blow-up point).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user parameter (irrational-ness check, malformed config, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A memory or size budget was exceeded.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, long partial)
      : std::runtime_error(what), partial_(partial) {}
  long partial() const noexcept { return partial_; }

 private:
  long partial_;
};

}  // namespace bglue
