#pragma once
// Exception hierarchy shared by every framesim module.
//
// Loaders throw InputError (and subclasses) for anything wrong with the bytes
// they were handed; algorithms throw InvalidArgument for precondition
// violations. The CLI maps these onto its exit-code contract.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace framesim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data (files, record streams).
class InputError : public Error {
public:
    using Error::Error;
};

// A record stream line that could not be parsed or does not fit its schema.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A record names a frame (or other entity) that does not exist.
class ReferenceError : public InputError {
public:
    ReferenceError(std::string ref, const std::string& what)
        : InputError(what), ref_(std::move(ref)) {}

    const std::string& ref() const noexcept { return ref_; }

private:
    std::string ref_;
};

class DuplicateError : public InputError {
public:
    using InputError::InputError;
};

// The graph loaded but violates a structural invariant (cycle, duplicate edge).
class ValidationError : public InputError {
public:
    using InputError::InputError;
};

// Precondition violation on an algorithm argument.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Cosine similarity requested for a zero vector / empty annotation.
class UndefinedSimilarity : public Error {
public:
    using Error::Error;
};

}  // namespace framesim
