#pragma once

#include <stdexcept>
#include <string>

namespace lambmp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (CSV or JSON).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure cannot produce a meaningful result
/// (singular system, divergence, zero-energy atom).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A delay or propagation does not fit the available window.
class WindowError : public Error {
public:
    WindowError(const std::string& what, std::size_t required_len)
        : Error(what), required_len_(required_len) {}

    std::size_t required_len() const noexcept { return required_len_; }

private:
    std::size_t required_len_;
};

}  // namespace lambmp
