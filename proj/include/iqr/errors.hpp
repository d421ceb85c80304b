#pragma once

// Exception types shared across the library.  Everything derives from
// iqr::Error so callers can catch one base type; specific types carry the
// payload named in the respective operation contracts (pivot index, line
// number, ...).

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iqr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes do not line up.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// Precondition on an argument value failed (eps <= 0, empty grid, ...).
struct InvalidArgument : Error {
    using Error::Error;
};

/// An LDL^T pivot came out non-positive.  `pivot_index` refers to the
/// original (unpermuted) row/column.
struct NotPositiveDefinite : Error {
    std::size_t pivot_index;
    explicit NotPositiveDefinite(std::size_t k)
        : Error("matrix is not positive definite (pivot " + std::to_string(k) + ")"),
          pivot_index(k) {}
};

/// Dense elimination hit a zero pivot column.
struct SingularMatrix : Error {
    using Error::Error;
};

/// x^T S x - 2 l^T x + c came out negative beyond the PSD rounding tolerance;
/// the (l, c) pair cannot belong to any y.
struct NegativeResidual : Error {
    using Error::Error;
};

/// Noise requested on an identically-zero signal: the L-inf ratio is undefined.
struct ZeroSignal : Error {
    using Error::Error;
};

/// Mesh has a non-positively-oriented or zero-area triangle, or inconsistent
/// boundary information.
struct DegenerateMesh : Error {
    using Error::Error;
};

/// Text artifact could not be parsed; `line` is 1-based.
struct ParseError : Error {
    std::size_t line;
    ParseError(std::size_t ln, const std::string& what)
        : Error("parse error at line " + std::to_string(ln) + ": " + what), line(ln) {}
};

/// A structural invariant of a loaded/constructed object failed validation.
struct InvariantViolation : Error {
    using Error::Error;
};

/// Robin recovery: every boundary edge fell under the small-trace guard.
struct AllGuarded : Error {
    using Error::Error;
};

/// Synthesis and inversion meshes coincide; the run would test nothing.
struct InverseCrime : Error {
    using Error::Error;
};

/// Run configuration is malformed (unknown key, missing field, bad value).
struct ConfigError : Error {
    using Error::Error;
};

/// Relative error against an identically-zero reference field.
struct DivisionByZero : Error {
    using Error::Error;
};

} // namespace iqr
