#pragma once

#include <stdexcept>
#include <string>

namespace graphrec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values (empty labels, out-of-range stars, bad config).
struct ValidationError : Error {
    using Error::Error;
};

// Edge or interaction endpoints of the wrong node kind.
struct SchemaError : Error {
    using Error::Error;
};

// NodeId or entity lookup failed.
struct NotFoundError : Error {
    using Error::Error;
};

// Operation called in a state its contract forbids.
struct PreconditionError : Error {
    using Error::Error;
};

// Malformed persisted file; message carries file and line.
struct ParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace graphrec
