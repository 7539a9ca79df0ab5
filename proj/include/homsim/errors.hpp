#pragma once

#include <stdexcept>

namespace homsim {

// Bad inputs: malformed config files, out-of-range parameters, unusable data.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Inputs that are well-formed but physically degenerate for the requested
// operation, e.g. a coupler with no supermode beating asked for its 50/50
// points, or flat data handed to the dip fitter.
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace homsim
