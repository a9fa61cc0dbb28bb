#pragma once

#include <stdexcept>
#include <string>

namespace poolbench {

// Bad input data: unparsable files, malformed records, missing embeddings.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (caller error, not data error).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical or training failure (non-finite loss etc).
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace poolbench
