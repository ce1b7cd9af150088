// Exception types shared by all qbattery modules

#pragma once

#include <stdexcept>
#include <string>

namespace qbattery {

// Matrix or vector of unsupported size, or mismatched operand sizes.
struct InvalidDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical invariant (Hermiticity, unit trace, PSD, completeness ...) failed.
struct ContractViolation : std::domain_error {
    using std::domain_error::domain_error;
};

// A parameter outside its documented domain (p not in [0,1], negative t ...).
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Closed-form coefficients are singular at these parameters.
struct DegenerateParameters : std::domain_error {
    using std::domain_error::domain_error;
};

// A closed form was requested outside the region where it holds.
struct RegionMismatch : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace qbattery
