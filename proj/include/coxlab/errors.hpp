#pragma once

#include <stdexcept>
#include <string>

namespace coxlab {

// Invalid input -> CLI exit 1, numerical failure -> CLI exit 2.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : InputError {
    using InputError::InputError;
};
struct ParameterError : InputError {
    using InputError::InputError;
};
struct InvalidEta : InputError {
    using InputError::InputError;
};
struct PoleError : InputError {
    using InputError::InputError;
};
struct NoBoundState : InputError {
    using InputError::InputError;
};

struct SingularLambda : NumericalError {
    using NumericalError::NumericalError;
};
struct NonConvergence : NumericalError {
    using NumericalError::NumericalError;
};
struct GridTooCoarse : NumericalError {
    using NumericalError::NumericalError;
};
struct CutoffTooSmall : NumericalError {
    using NumericalError::NumericalError;
};
struct StepFailure : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace coxlab
