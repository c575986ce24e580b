#pragma once

#include <stdexcept>
#include <string>

namespace illiq {

/// Base of every error raised by the library. The CLI maps these to exit
/// code 3 (ConfigError maps to 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ILLIQ_DEFINE_ERROR(Name)            \
  class Name : public Error {               \
   public:                                  \
    explicit Name(const std::string& what)  \
        : Error(#Name ": " + what) {}       \
  };

ILLIQ_DEFINE_ERROR(ParseError)
ILLIQ_DEFINE_ERROR(ProbabilityError)
ILLIQ_DEFINE_ERROR(SpaceMismatch)
ILLIQ_DEFINE_ERROR(InvalidParams)
ILLIQ_DEFINE_ERROR(InvalidModel)
ILLIQ_DEFINE_ERROR(QuadratureNonConvergence)
ILLIQ_DEFINE_ERROR(TrancheCapViolation)
ILLIQ_DEFINE_ERROR(MissingProbability)
ILLIQ_DEFINE_ERROR(NonFiniteInput)
ILLIQ_DEFINE_ERROR(UnsupportedModelForShortSide)
ILLIQ_DEFINE_ERROR(NonPSDCovariance)
ILLIQ_DEFINE_ERROR(EmptyGrid)
ILLIQ_DEFINE_ERROR(OutOfGridSpan)
ILLIQ_DEFINE_ERROR(AbsoluteContinuityViolation)
ILLIQ_DEFINE_ERROR(ConfigError)

#undef ILLIQ_DEFINE_ERROR

}  // namespace illiq
