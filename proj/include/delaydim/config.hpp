#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delaydim/geometry.hpp"
#include "delaydim/solver.hpp"

namespace delaydim {

struct NumericsConfig {
  double T = 20.0;             // simulate horizon
  std::uint64_t seed = 1;
  std::vector<double> horizons{10.0, 20.0, 40.0};
  std::size_t n_initial = 100;
  std::size_t n_pairs = 100;
  int n_branches = 8;
  std::size_t samples = 200;   // K, M estimation
  double ergodic_T = 2000.0;
  double ergodic_burn_in = 20.0;
  double absorbing_T = 100.0;  // run used for the default c
  double absorbing_burn_in = 20.0;
  std::size_t box_scales = 12;
  std::size_t csv_stride = 1;
};

struct BoundParams {
  double alpha = 1.0;
  std::optional<double> t0;  // default 2 tau
  std::size_t cutoff_index = 1;
  std::optional<double> c;   // default: estimated absorbing radius
  std::optional<double> K_override;
  std::optional<double> M_override;
};

struct CoverParams {
  std::size_t m = 2;
  double r1 = 1.0;
  double r2 = 2.0;
  NormKind norm = NormKind::sup;
};

struct RunConfig {
  ModelConfig model;
  NumericsConfig numerics;
  BoundParams bound;
  CoverParams cover;
  std::optional<std::string> output_dir;

  double t0() const { return bound.t0.value_or(2.0 * model.tau); }
  /// Cross-field checks; throws ConfigError naming the offending field.
  void validate() const;
  /// Divides experiment sizes by 10 (with small floors) for smoke runs.
  void apply_quick();
};

/// Parses JSON (first non-blank character '{') or dotted key = value text.
/// Unknown keys are rejected. The result is validated.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Canonical JSON of the configuration (sorted keys), used for hashing.
std::string canonical_config(const RunConfig& cfg);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace delaydim
