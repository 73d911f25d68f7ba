#pragma once

#include <stdexcept>
#include <string>

namespace p3b {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configuration at (or numerically indistinguishable from) a binary collision.
struct DegenerateConfiguration : Error {
    using Error::Error;
};

// Input expected to have center of mass at the origin.
struct NotCentered : Error {
    using Error::Error;
};

// Metric data requested closer to a collision point than the cusp guard allows.
struct CuspGuardViolation : Error {
    using Error::Error;
};

// An equator crossing located too close to a collision point to label reliably.
struct AmbiguousCrossing : Error {
    using Error::Error;
};

struct InvalidInput : Error {
    using Error::Error;
};

// The shooting grid found no sign-change bracket for the requested target.
struct ResolutionExceeded : Error {
    using Error::Error;
};

// A perturbed orbit left the ends of its parent straight orbit.
struct PerturbationTooLarge : Error {
    using Error::Error;
};

struct VerificationFailed : Error {
    using Error::Error;
};

}  // namespace p3b
