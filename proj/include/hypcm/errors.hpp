#pragma once

#include <stdexcept>
#include <string>

namespace hypcm {

enum class ErrorCategory {
  Domain,
  Config,
  Numeric,
  Inadmissible,
  NonConvergence,
  Safeguard,
  Infeasible,
  Undetermined,
  ContinuationStall,
  Io,
  Fit,
  FocalCrossing,
};

const char* category_name(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define HYPCM_DEFINE_ERROR(Name, Cat)                                          \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(ErrorCategory::Cat, what) {} \
  };

HYPCM_DEFINE_ERROR(DomainError, Domain)
HYPCM_DEFINE_ERROR(ConfigError, Config)
HYPCM_DEFINE_ERROR(NumericError, Numeric)
HYPCM_DEFINE_ERROR(InadmissibleError, Inadmissible)
HYPCM_DEFINE_ERROR(SafeguardError, Safeguard)
HYPCM_DEFINE_ERROR(InfeasibleError, Infeasible)
HYPCM_DEFINE_ERROR(UndeterminedError, Undetermined)
HYPCM_DEFINE_ERROR(IoError, Io)
HYPCM_DEFINE_ERROR(FitError, Fit)
HYPCM_DEFINE_ERROR(FocalCrossingError, FocalCrossing)

#undef HYPCM_DEFINE_ERROR

/// Newton ran out of iterations; carries the last sup-norm residual.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double last_residual)
      : Error(ErrorCategory::NonConvergence, what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace hypcm
