#pragma once

#include <stdexcept>
#include <string>

namespace dgot {

/// Malformed input: bad files, invalid parameters, precondition violations the
/// caller can fix by changing the input. The CLI maps these to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a valid result (singular system,
/// missing reachability, ...). The CLI maps these to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dgot
