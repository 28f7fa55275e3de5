#pragma once

#include <stdexcept>
#include <string>

namespace uavslice {

// Invalid configuration values or malformed config input. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures while running a valid configuration. Maps to exit code 3.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SearchSpaceTooLarge : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class DimensionMismatch : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class NonFiniteLoss : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace uavslice
