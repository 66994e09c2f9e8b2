#pragma once

#include <stdexcept>
#include <string>

namespace hypersym {

/// Dimension, chart or degree mismatch in a call.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A 2-form whose coefficient matrix is singular where an inverse is needed.
class DegenerateForm : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank-deficient tangent frame or similar geometric failure.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero-energy level set: a fixed point, not a torus.
class DegenerateOrbit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric bilinear form with an eigenvalue too close to zero.
class DegenerateMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition that is verified numerically rather than assumed.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid scenario configuration; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace hypersym
