#ifndef CTXIML_ERRORS_H_
#define CTXIML_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ctximl {

// A caller broke a documented precondition (shape mismatch, empty context,
// invalid count, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The external predictor channel failed: malformed response, timeout, remote
// error message or a dead child process.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A linear system could not be solved to the requested accuracy.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctximl

#endif  // CTXIML_ERRORS_H_
