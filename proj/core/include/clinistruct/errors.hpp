#pragma once

#include <stdexcept>
#include <string>

namespace clinistruct {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input bytes (document, config, catalog JSON, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a domain rule.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem and serialization failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Lookup of an id, object or artifact that does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

} // namespace clinistruct
