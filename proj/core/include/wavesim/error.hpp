#pragma once

#include <stdexcept>
#include <string>

namespace wavesim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file or stream.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input text (CSV header, timestamps, JSON layout).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Not enough data, or data of the wrong shape.
class SizeError : public Error {
public:
    using Error::Error;
};

/// An estimation routine failed to produce a usable optimum.
class FitError : public Error {
public:
    using Error::Error;
};

/// Model file is structurally valid text but violates the model schema
/// or a model invariant.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace wavesim
