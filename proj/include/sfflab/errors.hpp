#pragma once

#include <stdexcept>
#include <string>

namespace sfflab {

// Bad user input: rejected parameters, malformed config files. CLI exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Backend failures (eigensolver non-convergence, residuals out of tolerance)
// and physics-level degeneracies (filter missing the spectrum, dressing
// resonances). CLI exit code 3.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sfflab
