#pragma once

#include <stdexcept>
#include <string>

namespace ruinkit {

// Base class for all library-specific failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required second moment does not exist (e.g. Pareto tail index <= 2).
struct InfiniteSecondMoment : Error {
    using Error::Error;
};

// The law has no exponential moments (heavy tail).
struct NoMGF : Error {
    using Error::Error;
};

// The tilting parameter lies outside the convergence strip of the
// exponential-moment integrals.
struct OutsideConvergenceStrip : Error {
    using Error::Error;
};

// Net profit condition fails (weak inequality): ruin is certain.
struct NetProfitViolated : Error {
    using Error::Error;
};

// No positive root of the exponential-moment balance in the strip.
struct NoAdjustmentCoefficient : Error {
    using Error::Error;
};

// The requested computation is not defined for these inputs (e.g. the
// tilted kernel or the integral-equation solver at c = 0).
struct NotApplicable : Error {
    using Error::Error;
};

// The operation supports only a subset of jump laws.
struct UnsupportedJumpLaw : Error {
    using Error::Error;
};

// Iteration failed to reach the requested tolerance.
struct NoConvergence : Error {
    using Error::Error;
};

// Malformed or incomplete run configuration.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace ruinkit
