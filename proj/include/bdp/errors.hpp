#pragma once

#include <stdexcept>
#include <string>

namespace bdp {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A state outside the region where rates (or nu values) are defined,
// or an argument combination the operation is undefined for (k == s,
// invalid ordering in the renewal identity, ...).
struct domain_error : error {
  using error::error;
};

// A scalar parameter outside its admissible range (c <= 0, beta <= 0,
// d0 == 0, trials == 0, tolerance out of range, ...).
struct parameter_error : error {
  using error::error;
};

// Rate positivity violations found when building or checking a process.
struct validation_error : error {
  using error::error;
};

// A nu sequence that stops being positive or strictly monotone while it
// is being extended. `state` is the first offending lattice site.
struct positivity_error : error {
  positivity_error(const std::string& what, int state_)
      : error(what), state(state_) {}
  int state;
};

// The nu sequence does not solve the three-term recurrence for the
// process it was paired with.
struct incompatible_nu_error : error {
  using error::error;
};

// A numerical routine could not reach its accuracy target: series term
// cap exceeded, step-size underflow, truncation window too small.
struct accuracy_error : error {
  using error::error;
};

// Malformed or out-of-range config file content. `line` is 1-based,
// 0 when no line is attributable.
struct config_error : error {
  config_error(const std::string& what, int line_ = 0)
      : error(what), line(line_) {}
  int line;
};

}  // namespace bdp
