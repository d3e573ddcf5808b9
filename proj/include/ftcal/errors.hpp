#pragma once

#include <stdexcept>
#include <string>

namespace ftcal {

// Base class so callers can catch anything ftcal throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid hyperparameters or configuration (nu=0, lambda<0, bad split fraction, ...).
struct SpecError : Error {
    using Error::Error;
};

// Dimension mismatches between matrices, vectors, samples and model layout.
struct ShapeError : Error {
    using Error::Error;
};

// Bad values in otherwise well-shaped data (NaN/Inf, non-monotone timestamps, ...).
struct DataError : Error {
    using Error::Error;
};

// Not enough rows/history to perform the requested operation.
struct InsufficientDataError : DataError {
    using DataError::DataError;
};

// Malformed file contents; message carries row/column location where known.
struct ParseError : DataError {
    using DataError::DataError;
};

// A required column is missing from an input file.
struct SchemaError : DataError {
    struct ColumnTag {};
    SchemaError(ColumnTag, const std::string& column)
        : DataError("missing required column: " + column), missing_column(column) {}
    explicit SchemaError(const std::string& msg) : DataError(msg) {}
    std::string missing_column;
};

// Requested wrench/temperature outside the transducer's declared operating envelope.
struct EnvelopeError : DataError {
    using DataError::DataError;
};

// Metric undefined for the given inputs (e.g. BestFit on a constant series).
struct UndefinedMetricError : Error {
    using Error::Error;
};

// Model document has an unsupported schema version.
struct VersionError : ParseError {
    using ParseError::ParseError;
};

}  // namespace ftcal
