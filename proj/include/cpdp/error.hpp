#pragma once

#include <stdexcept>
#include <string>

namespace cpdp {

/// Malformed or inconsistent input data (files, matrices, label vectors).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration or command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cpdp
