#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kwise {

// Invalid user input (bad grid sizes, exponents out of range, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A state that violates a structural requirement of the requested
// operation (zero component, off-manifold input, ...).
class InvalidState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative solver ran out of budget. Carries the last residual so
// callers can decide whether the partial result is still usable.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual(last_residual) {}
    double last_residual;
};

// Componentwise scaling onto the constraint set does not exist or the
// Newton iteration for it diverged. Carries the final residuals.
class NotProjectable : public std::runtime_error {
public:
    NotProjectable(const std::string& what, std::vector<double> residuals = {})
        : std::runtime_error(what), residuals(std::move(residuals)) {}
    std::vector<double> residuals;
};

}  // namespace kwise
