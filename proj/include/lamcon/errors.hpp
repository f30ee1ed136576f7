#pragma once

#include <stdexcept>
#include <string>

namespace lamcon {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad domain parameters (resolution below minimum, non-even grid, ...).
struct ConfigurationError : Error {
    using Error::Error;
};

/// Mismatched domains, matrix dimensions or form degrees.
struct ShapeError : Error {
    using Error::Error;
};

/// Gauge not invertible at a grid point; message names the point.
struct SingularGaugeError : Error {
    using Error::Error;
};

/// Laurent evaluation at lambda = 0 with negative powers present.
struct PoleError : Error {
    using Error::Error;
};

/// |det g| too small on the unit circle; winding number undefined.
struct IndeterminateWindingError : Error {
    using Error::Error;
};

/// Constant reduction of the flatness equation has no root for this target.
struct NoConstantSolutionError : Error {
    using Error::Error;
};

/// Degenerate builder input (|q| = 0, ...).
struct DegenerateInputError : Error {
    using Error::Error;
};

/// ODE blow-up before covering the requested range; message carries the
/// achieved range.
struct PartialSolutionError : Error {
    PartialSolutionError(const std::string& msg, double achieved)
        : Error(msg), achieved_range(achieved) {}
    double achieved_range;
};

/// Higgs field vanishes at a grid point (branch point; unsupported).
struct ZeroLocusError : Error {
    using Error::Error;
};

/// Residual negative-power coefficients above tolerance after gauging.
struct NotTwistableError : Error {
    using Error::Error;
};

/// Operation requires a closed (torus) domain.
struct UnsupportedDomainError : Error {
    using Error::Error;
};

/// Family is not the lift of a section at lambda = 0 (type-impure k = -1
/// coefficient).
struct InvalidLiftError : Error {
    using Error::Error;
};

/// Family is too far from flat for frame integration.
struct FlatnessViolationError : Error {
    using Error::Error;
};

/// Moving frame numerically degenerate (condition number too large).
struct IllConditionedError : Error {
    using Error::Error;
};

/// Immersion degenerate (conformal factor below threshold).
struct DegenerateSurfaceError : Error {
    using Error::Error;
};

/// Rank drop in the sphere congruence (branch point).
struct RankError : Error {
    using Error::Error;
};

}  // namespace lamcon
