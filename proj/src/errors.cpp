#include "hypcm/errors.hpp"

namespace hypcm {

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Domain: return "domain";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Numeric: return "numeric";
    case ErrorCategory::Inadmissible: return "inadmissible";
    case ErrorCategory::NonConvergence: return "nonconvergence";
    case ErrorCategory::Safeguard: return "safeguard";
    case ErrorCategory::Infeasible: return "infeasible";
    case ErrorCategory::Undetermined: return "undetermined";
    case ErrorCategory::ContinuationStall: return "continuation-stall";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Fit: return "fit";
    case ErrorCategory::FocalCrossing: return "focal-crossing";
  }
  return "unknown";
}

}  // namespace hypcm
