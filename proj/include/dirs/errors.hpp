#pragma once

#include <stdexcept>
#include <string>

namespace dirs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// A decision that violates the placement, MEC-capacity or power constraints,
// or that asks an offloader to transmit with zero rate.
struct InfeasibleDecision : Error {
    using Error::Error;
};

// Brute-force oracles refuse instances beyond the scale they can enumerate.
struct OracleScale : Error {
    using Error::Error;
};

struct BufferSaturated : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace dirs
