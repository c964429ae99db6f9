#pragma once

#include <stdexcept>
#include <string>

namespace hintbits {

// Malformed or unreadable input data (embedding files, test sets).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hintbits
