// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace byzfl {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands of an arithmetic op disagree on length.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument is outside its documented domain (negative std, empty data, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A configuration is inconsistent or names something unknown.
/// The message starts with the offending field path when one is known.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data violates a model or dataset invariant (e.g. label out of range).
class DataError : public Error {
public:
    using Error::Error;
};

/// A file could not be parsed. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::string const& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace byzfl
