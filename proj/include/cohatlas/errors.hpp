// errors.hpp - Exception types shared by all cohatlas modules

#pragma once

#include <stdexcept>
#include <string>

namespace cohatlas {

// Bad input: malformed config, out-of-range index, inconsistent dimensions.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation ran but could not certify its result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature grid too coarse for the requested tolerance; carries the measured defect.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double defect)
        : NumericalError(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

// Polynomial degree exceeds what the truncation can represent.
class DegreeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace cohatlas
