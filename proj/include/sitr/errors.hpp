#pragma once

#include <stdexcept>
#include <string>

namespace sitr {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes: config/usage -> 2, io -> 3, numeric -> 4, contract -> 5.

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatches are contract violations; kept distinct so tests can
// target them precisely.
struct shape_error : contract_error {
  using contract_error::contract_error;
};

}  // namespace sitr
