#pragma once

#include <stdexcept>
#include <string>

namespace nextjump {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter set violates a SystemParams invariant.
struct InvalidParamsError : Error {
    using Error::Error;
};

// omega1 == 0: eta (and everything built on it) is undefined.
struct EtaUndefinedError : InvalidParamsError {
    using InvalidParamsError::InvalidParamsError;
};

// dt * beta1 exceeds the fixed-step integrator guard.
struct StepSizeError : Error {
    using Error::Error;
};

// Conditioning on no jump requested for a state with W = 0.
struct ConditioningError : Error {
    using Error::Error;
};

// A closed form was evaluated outside its domain (4eps^2 >= 1, alpha >= 1, ...).
struct RegimeDomainError : Error {
    using Error::Error;
};

// Monte Carlo bookkeeping errors (zero jump rate, empty aggregation input).
struct SamplingError : Error {
    using Error::Error;
};

// Bad config file / flag values in the CLI layer.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace nextjump
