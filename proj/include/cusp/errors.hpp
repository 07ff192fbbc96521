#pragma once

#include <stdexcept>
#include <string>

namespace cusp {

// Parameter outside its mathematical domain (non-positive shape, v outside (0,1], ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Dimension mismatch between inputs.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Floating-point failure (factorization breakdown after jitter escalation, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A categorical/ESS input with no usable probability mass or variation.
struct DegenerateDistributionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file; message carries row/column location.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (bad hyper-parameters, H_init > p+1, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Persisted draws inconsistent with their manifest.
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An aggregation with zero successful inputs.
struct EmptyResultError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cusp
