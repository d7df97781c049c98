#pragma once

#include <stdexcept>
#include <string>

namespace parax {

// Error categories map onto CLI exit codes: validation -> 2,
// numeric domain -> 3, I/O -> 4.

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace parax
