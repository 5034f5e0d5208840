#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kernelcur {

// Base for every error the library raises on bad input or contract violation.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

// Value outside the mathematical domain of a metric (empty list, t <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Inputs that parse but violate a cross-record invariant (duplicate keys, bad joins).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A runner broke the wire protocol (unknown id, malformed frame, missing fixture).
class ProtocolError : public Error {
public:
    using Error::Error;
};

// The runner process could not be started or failed the version handshake.
class HandshakeError : public Error {
public:
    using Error::Error;
};

}  // namespace kernelcur
