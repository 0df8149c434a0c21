#pragma once

// Run configuration for the command-line front end.
//
// The config file is a flat key = value format with [section] headers.
// '#' starts a comment at the beginning of a line or after whitespace. Keys
// are unique within a section; unknown sections or keys are errors. See README.md for the complete list.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypcm/expression.hpp"
#include "hypcm/solver.hpp"
#include "hypcm/sphere_grid.hpp"

namespace hypcm {

enum class RunMode { Solve, Validate, Steiner, SphereTest };

RunMode parse_run_mode(const std::string& s);
const char* run_mode_name(RunMode m);

using IniSections = std::map<std::string, std::map<std::string, std::string>>;

/// Throws ConfigError with the line number on malformed input.
IniSections parse_ini(const std::string& text);

/// A scalar field on the sphere: a constant, an expression over (theta, phi),
/// or a CSV table with columns theta, phi and `column`, one row per node in
/// node order.
struct FieldSpec {
  enum class Kind { Constant, Expression, Table };
  Kind kind = Kind::Constant;
  double constant = 1.0;
  std::string text;          // expression source or table path
  std::string column = "value";

  /// Throws ConfigError (bad expression / table mismatch) or IoError.
  ScalarField sample(const SphereGrid& grid) const;
  std::string describe() const;
};

struct RunConfig {
  RunMode mode = RunMode::Solve;
  int n = 2;
  int k = 1;
  GridMode grid_mode = GridMode::Axisymmetric;
  int n_theta = 64;
  int n_phi = 128;
  std::optional<FieldSpec> f0;
  ContinuationConfig continuation;
  std::string out_dir = ".";
  bool emit_csv = true;
  bool emit_mesh = false;
  bool emit_report = true;
  std::uint64_t seed = 0;

  // steiner
  std::optional<FieldSpec> body;
  std::vector<double> t_samples = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::string mask = "all";

  // validate
  std::optional<FieldSpec> candidate;
  std::vector<FieldSpec> perturbations;

  /// Checks cross-field invariants (1 <= k <= n, n = 2 on full-s2 grids,
  /// required fields present for the mode). Throws ConfigError.
  void validate() const;
};

/// Builds a config for `mode` from INI text. Relative table paths resolve
/// against `base_dir`.
RunConfig parse_run_config(const std::string& text, RunMode mode, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path, RunMode mode);

}  // namespace hypcm
