#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdlatlrr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller passed an out-of-contract argument (bad size, stride, tau, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Input data is unusable: unreadable file, malformed header, shape mismatch
/// between a patch matrix and its geometry, training pool too small.
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed: SVD did not converge, or NaN/Inf appeared.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, std::size_t iteration = 0)
        : Error(what), iteration_(iteration) {}

    /// Solver iteration at which the failure was detected (0 if not iterative).
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

}  // namespace mdlatlrr
