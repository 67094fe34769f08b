#pragma once

#include <stdexcept>
#include <string>

namespace secgame {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed-loop (or open-loop) matrix has an eigenvalue with Re >= threshold.
struct NotHurwitzError : Error {
    using Error::Error;
};

// Lyapunov solve residual exceeded tolerance.
struct IllConditionedError : Error {
    using Error::Error;
};

struct NoStabilizingStartError : Error {
    using Error::Error;
};

struct LineSearchFailureError : Error {
    using Error::Error;
};

// Pattern or action enumeration would exceed the configured cap.
struct CapExceededError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct HashMismatchError : Error {
    using Error::Error;
};

struct WeightSumMismatchError : Error {
    using Error::Error;
};

// Per-model CBSE payoff is zero, so a relative mismatch is undefined.
struct DegenerateDenominatorError : Error {
    using Error::Error;
};

}  // namespace secgame
