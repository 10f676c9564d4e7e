#ifndef RIVEQ_ERRORS_HPP
#define RIVEQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace riveq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation outside [a,b] x [-B,B].
struct DomainViolation : Error {
    using Error::Error;
};

/// Objective returned NaN or infinity on the search grid.
struct NonFiniteValue : Error {
    using Error::Error;
};

/// Coercive bracket expansion ran past the numerical eval bound B.
struct BracketOverflow : Error {
    using Error::Error;
};

struct PreconditionViolation : Error {
    using Error::Error;
};

struct OutOfRange : Error {
    using Error::Error;
};

struct MalformedTransition : Error {
    using Error::Error;
};

/// Jump endpoints do not satisfy the one-sided slope inequalities on the
/// whole jump interval.
struct JumpConditionViolation : Error {
    using Error::Error;
};

/// Frozen-time minimizing-movement iteration exceeded its cap or failed the
/// start-point convergence recheck.
struct ChainDivergence : Error {
    using Error::Error;
};

/// Cauchy defect between the two finest refinement levels above tolerance.
struct NonConvergence : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace riveq

#endif
