#pragma once

#include <stdexcept>
#include <string>

namespace ousparse {

/// Operand shapes do not agree (non-square, size mismatch).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the operation's domain (non-finite, asymmetric, bad parameter).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Drift matrix has an eigenvalue with non-positive real part.
struct StabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A simulated state or solver objective blew up.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Design matrix of a likelihood solve is numerically singular.
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested operation is not available for this model or data.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Jump law lacks the moment a formula needs.
struct MomentError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Config file could not be parsed or validated.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A record requested for replay does not exist or does not match.
struct LookupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ousparse
