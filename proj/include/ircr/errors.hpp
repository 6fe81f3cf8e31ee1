#pragma once

#include <stdexcept>
#include <string>

namespace ircr {

// Malformed or out-of-contract input. The message names the offending field.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed request with no feasible solution (e.g. unbounded objective
// everywhere, or an empty feasible set in a discrete search).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ircr
