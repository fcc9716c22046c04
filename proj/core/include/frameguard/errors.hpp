// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frameguard {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value fell outside the bound its type declares. The message names the bound.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A statistic was requested over a sample that is empty after filtering.
class EmptySampleError : public Error {
public:
    using Error::Error;
};

/// Malformed bytes on the wire, or a peer that broke message ordering.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// A message field does not fit its wire width.
class EncodeError : public Error {
public:
    using Error::Error;
};

/// An API was called in a state its contract forbids.
class UsageError : public Error {
public:
    using Error::Error;
};

class HandshakeError : public Error {
public:
    using Error::Error;
};

class BindError : public Error {
public:
    using Error::Error;
};

/// Stream closed or broke while a match was running.
class ConnectionError : public Error {
public:
    using Error::Error;
};

/// calibrate_delay was handed a slow mean below the fast mean.
class SwappedInputsError : public Error {
public:
    using Error::Error;
};

/// Text input (CSV, config, summary) that could not be parsed. Carries the 1-based line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    /// The same error, prefixed with the file it came from.
    ParseError(const std::string& source, const ParseError& inner)
        : Error(source + ": " + inner.what()), line_(inner.line_)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace frameguard
