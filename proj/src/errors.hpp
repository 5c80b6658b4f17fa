#pragma once

#include <stdexcept>
#include <string>

namespace catinfo {

// Error taxonomy. The C API maps these onto status codes and the CLI onto
// exit codes (input-class errors -> 2, numeric failures -> 3).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be opened / read.
struct IoError : Error {
    using Error::Error;
};

// Malformed text input: CSV rows, formula strings, JSON configs.
struct ParseError : Error {
    using Error::Error;
};

// Unknown variables or levels, schema-invariant violations.
struct SchemaError : Error {
    using Error::Error;
};

// Operation preconditions violated on otherwise valid data.
struct DomainError : Error {
    using Error::Error;
};

// Degenerate tables, rank deficiency, non-finite intermediate values.
struct NumericError : Error {
    using Error::Error;
};

} // namespace catinfo
