#pragma once

#include <stdexcept>
#include <string>

namespace geu {

// Error categories map onto the CLI exit codes: config -> 1, data -> 2,
// numerical -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

// eigsolve
struct NotPositiveDefinite : NumericalError {
    using NumericalError::NumericalError;
};
struct DimensionMismatch : NumericalError {
    using NumericalError::NumericalError;
};

// graph
struct SingleClass : DataError {
    using DataError::DataError;
};
struct KTooLarge : DataError {
    using DataError::DataError;
};

// uncertainty
struct TooFewSamples : DataError {
    using DataError::DataError;
};
struct NegativeVariance : DataError {
    using DataError::DataError;
};
struct ShapeMismatch : DataError {
    using DataError::DataError;
};

// embedding
struct InsufficientPositiveEigenvalues : NumericalError {
    using NumericalError::NumericalError;
};

// classify
struct EmptyModel : DataError {
    using DataError::DataError;
};
struct LengthMismatch : DataError {
    using DataError::DataError;
};

// data
struct ParseError : DataError {
    using DataError::DataError;
};
struct MissingLabelColumn : DataError {
    using DataError::DataError;
};
struct NonNumericFeature : DataError {
    using DataError::DataError;
};
struct ClassTooSmall : DataError {
    using DataError::DataError;
};
struct SizeTooLarge : DataError {
    using DataError::DataError;
};
struct NotTwoDimensional : DataError {
    using DataError::DataError;
};

}  // namespace geu
