#pragma once

#include <stdexcept>
#include <string>

namespace cracksynth {

// Base class for all library errors. Subclasses mark the failure kind so
// callers (and the CLI exit-code mapping) can dispatch without string
// matching.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Two generator points coincide within the dedup tolerance.
struct DegenerateInputError : Error {
    using Error::Error;
};

// Facet matching between neighboring cells failed at the given tolerance.
struct InconsistentGeometryError : Error {
    using Error::Error;
};

// A zero-length arc or zero-area facet survived extraction.
struct ZeroWeightError : Error {
    using Error::Error;
};

// No path exists between the requested vertices under the arc filter.
struct UnreachableError : Error {
    using Error::Error;
};

// A constructed cycle is not a single simple closed cycle.
struct DegenerateCycleError : Error {
    using Error::Error;
};

// The input cycle is not closed or not simple.
struct InvalidCycleError : Error {
    using Error::Error;
};

// A binary program (or surface problem) admits no feasible solution.
struct InfeasibleError : Error {
    using Error::Error;
};

// Branch-and-bound exceeded its node budget.
struct NodeLimitError : Error {
    using Error::Error;
};

// Iterative sphere packing failed to remove all overlaps.
struct NonConvergenceError : Error {
    using Error::Error;
};

// Too few samples to estimate statistics.
struct InsufficientSamplesError : Error {
    using Error::Error;
};

// Volume dimensions do not agree.
struct DimensionMismatchError : Error {
    using Error::Error;
};

// Malformed program data (inconsistent dimensions, nonpositive costs, ...).
struct InvalidProgramError : Error {
    using Error::Error;
};

// Bad or inconsistent configuration.
struct ConfigError : Error {
    using Error::Error;
};

// File input/output failure.
struct IoError : Error {
    using Error::Error;
};

// Violated internal invariant; indicates a bug, not bad input.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace cracksynth
