#pragma once

#include <stdexcept>
#include <string>

namespace sdreg {

// Matrix handed to a Cholesky-based routine was not positive definite.
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NaN or infinity showed up where a finite value is required.
struct NonFinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A guaranteed property of the damped update chain failed at runtime.
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Classic BFGS update rejected a pair with s'y <= 0.
struct CurvatureNotPositive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    long line_number;
};

struct NonBinaryLabels : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingColumn : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Signed-rank test has no nonzero differences to rank.
struct AllTies : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sdreg
