#pragma once

#include <stdexcept>
#include <string>

namespace unifield {

// All recoverable failures are exceptions rooted here so callers can catch
// one type at tool boundaries and map to an exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A size, count, wavelength, spacing, power or tolerance that must be > 0
// (or >= 0 where stated) is not.
struct NonPositiveParameter : Error {
    using Error::Error;
};

// A spherical-wave source coincides with an array element, so the phase
// reference distance is undefined.
struct SourceOnArray : Error {
    using Error::Error;
};

// A [lo, hi] range with lo > hi, or a near-field bound past the far-field one.
struct InconsistentBounds : Error {
    using Error::Error;
};

// More pilot symbols requested than the configured budget allows.
struct PilotBudgetExceeded : Error {
    using Error::Error;
};

// Matrix/vector shapes do not line up for the requested operation.
struct DimensionMismatch : Error {
    using Error::Error;
};

// Sparse solver cannot make progress: nonzero target but all atom
// correlations vanish.
struct NoProgress : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

// Division by a zero-valued reference (e.g. NMSE with a zero truth vector).
struct ZeroReference : Error {
    using Error::Error;
};

// Fewer beam-sweep feedback reports than the precoder construction needs.
struct InsufficientFeedback : Error {
    using Error::Error;
};

// The analog stage collapsed the effective channel below rank K, so the
// baseband ZF inverse does not exist.
struct RankDeficientEffectiveChannel : Error {
    using Error::Error;
};

// H H^H is numerically singular; fully digital ZF is undefined.
struct SingularChannel : Error {
    using Error::Error;
};

struct EmptyTrainingSet : Error {
    using Error::Error;
};

struct UnknownPreset : Error {
    using Error::Error;
};

// File could not be opened, read, or written.
struct IoFailure : Error {
    using Error::Error;
};

// Bad key, unparsable value, or inconsistent combination in a config source.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace unifield
