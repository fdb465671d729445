#pragma once

#include <stdexcept>
#include <string>

namespace rwre {

// Bad arguments or violated preconditions; the CLI maps this to exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure (non-convergence, underflow); CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : NumericalError {
    SolverError(const std::string& what, double residual_, long sweeps_)
        : NumericalError(what), residual(residual_), sweeps(sweeps_) {}
    double residual;
    long sweeps;
};

// Malformed or inconsistent files; CLI exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rwre
