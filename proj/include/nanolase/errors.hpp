// errors.hpp - error categories; the CLI maps these onto exit codes
#pragma once

#include <stdexcept>
#include <string>

namespace nanolase {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual const char* category() const noexcept { return "error"; }
};

// invalid physical input or precondition violation
struct DomainError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "domain"; }
};

// NaN/Inf state, quadrature failure, or other numerical breakdown
struct NumericError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "numeric"; }
};

// adaptive step size collapsed
struct StiffnessError : NumericError {
    using NumericError::NumericError;
    const char* category() const noexcept override { return "stiffness"; }
};

// iterative solver did not converge
struct ConvergenceError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "convergence"; }
};

// LL curve shows no slope change
struct NoThresholdError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "no-threshold"; }
};

// pulse analysis found no lasing pulse
struct NoPulseError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "no-pulse"; }
};

// signal never drops below half maximum on one side
struct UnboundedPulseError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "unbounded-pulse"; }
};

// trajectory too sparse for the requested analysis
struct ResolutionError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "resolution"; }
};

// fit objective has multiple local minima over the bracket
struct AmbiguousFitError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "ambiguous-fit"; }
};

// model never lases anywhere in the fit bracket
struct NoLasingError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "no-lasing"; }
};

// loss fraction requested at a state with zero total loss
struct UndefinedFractionError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "undefined-fraction"; }
};

// bad configuration file / CLI arguments
struct ConfigError : Error {
    using Error::Error;
    const char* category() const noexcept override { return "config"; }
};

}  // namespace nanolase
