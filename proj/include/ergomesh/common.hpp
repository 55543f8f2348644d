#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ergomesh {

// Error taxonomy, mapped to CLI exit codes: ConfigError -> 2,
// NumericError -> 3, IoError/ValidationError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File missing, parse failure, write failure.
struct IoError : Error {
    using Error::Error;
};

// Input data violates a structural invariant (degenerate face, bad index).
struct ValidationError : Error {
    using Error::Error;
};

// Bad parameters or dimension mismatches in API/config usage.
struct ConfigError : Error {
    using Error::Error;
};

// Solver breakdowns: eigensolve non-convergence, degenerate coverage.
struct NumericError : Error {
    using Error::Error;
};

void log_warning(const std::string& message);

// FNV-1a, used for mesh identity in the basis cache.
struct Fnv1a {
    std::uint64_t state = 1469598103934665603ull;

    void feed(const void* data, std::size_t size);

    template <typename T>
    void feed_value(const T& value) {
        feed(&value, sizeof(T));
    }

    std::uint64_t digest() const { return state; }
};

}  // namespace ergomesh
