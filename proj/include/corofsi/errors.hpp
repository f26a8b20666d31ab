/// @file errors.hpp
/// @brief Exception types thrown by the solver kernels and I/O layer.

#pragma once

#include <stdexcept>
#include <string>

namespace corofsi {

/// Base class for all library errors.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structure displacement reached or exceeded the tubular width L.
struct DisplacementTooLarge : SimError {
    using SimError::SimError;
};

/// Iterative root solve along a normal fiber failed to converge.
struct NoConvergence : SimError {
    using SimError::SimError;
};

/// A matrix argument required to be antisymmetric was not.
struct NotAntisymmetric : SimError {
    using SimError::SimError;
};

/// Lp exponent outside [1, inf].
struct BadExponent : SimError {
    using SimError::SimError;
};

/// Advective CFL number exceeded the 0.9 guard.
struct CFLViolation : SimError {
    using SimError::SimError;
};

/// Pressure projection CG failed to reach tolerance.
struct ProjectionDiverged : SimError {
    using SimError::SimError;
};

/// Implicit diffusion CG failed to reach tolerance.
struct DiffusionSolveDiverged : SimError {
    using SimError::SimError;
};

/// Generic implicit solve failure (Fokker-Planck diffusion stage).
struct SolveDiverged : SimError {
    using SimError::SimError;
};

/// Shell displacement hit the wall-contact guard 0.95*L.
struct WallContact : SimError {
    using SimError::SimError;
};

/// Two runs compared with incompatible grids or snapshot cadences.
struct GridMismatch : SimError {
    using SimError::SimError;
};

/// Rate fit requested on non-positive or insufficient data.
struct DegenerateFit : SimError {
    using SimError::SimError;
};

/// Config text could not be parsed; message carries the line number.
struct ParseError : SimError {
    using SimError::SimError;
};

/// Config parsed but violates a SimConfig invariant; message names it.
struct ValidationError : SimError {
    using SimError::SimError;
};

} // namespace corofsi
