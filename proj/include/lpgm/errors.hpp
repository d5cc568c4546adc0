#pragma once

#include <stdexcept>
#include <string>

namespace lpgm {

/// Argument outside an operation's precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation is valid in general but not for these parameters (e.g. surface
/// measure with p < 1).
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical invariant failed numerically. Indicates a bug.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// No interior stationary point for a Legendre target (beta <= e^{p alpha}).
class NoStationaryPointError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace lpgm
