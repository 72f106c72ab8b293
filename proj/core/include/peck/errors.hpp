#pragma once

#include <stdexcept>

namespace peck {

// Raised for malformed or contract-violating input data (files, layouts,
// fixtures). The CLI maps it to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace peck
