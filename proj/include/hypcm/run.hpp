#pragma once

#include <string>
#include <vector>

#include "hypcm/errors.hpp"
#include "hypcm/run_config.hpp"

namespace hypcm {

/// Process exit status for each error category:
/// config 2, infeasible / undetermined 3, continuation stall 4, I/O 5,
/// anything else (including failed validation) 1.
int exit_code_for(ErrorCategory c);

struct RunOutcome {
  int exit_code = 0;
  std::string category = "ok";  // machine-readable; error category name when failing
  std::string message;
  std::vector<std::string> files;  // written, in order
  std::string summary;             // human-readable table for stdout
};

/// Executes the configured pipeline and writes report.json / solution.csv /
/// mesh files into cfg.out_dir. Never throws for library errors; those are
/// mapped to the outcome's exit code and category.
RunOutcome run(const RunConfig& cfg);

}  // namespace hypcm
