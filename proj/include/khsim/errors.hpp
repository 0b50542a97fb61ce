#pragma once

#include <stdexcept>
#include <string>

namespace khsim {

// Bad user input: malformed netlist or config, unsupported topology,
// invalid parameters. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure during a run (singular matrices, non-finite state,
// Hermiticity loss). The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace khsim
