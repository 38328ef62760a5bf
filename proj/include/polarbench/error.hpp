// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace polarbench {

/// Argument outside the physical domain of an operation (negative radiance,
/// DoP above one, zenith past grazing, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Image or map dimensions that do not line up.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid scene, rig, capture or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate calibration input (too few or collinear patches).
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical stage produced output that violates its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polarbench
