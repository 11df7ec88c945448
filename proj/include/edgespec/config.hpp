#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edgespec/analysis.hpp"
#include "edgespec/boundary_spectrum.hpp"
#include "edgespec/counting.hpp"
#include "edgespec/model_params.hpp"

namespace edgespec {

struct CountSettings {
  std::vector<RegionKind> regions{RegionKind::TailBeyond, RegionKind::DyadicShell, RegionKind::Core};
  Bc bc = Bc::Neumann;
  double threshold_factor = 1.0;
  SkipPolicy skip = SkipPolicy::Provable;
};

// Everything a CLI invocation needs. INI layout:
//
//   [model]     n beta eps x_max mesh_nodes kappa mesh_floor delta_slack outer_bc
//   [spectrum]  source radii budget
//   [sweep]     lambda_min lambda_max points p_values b_rule
//               slope_tol weyl_tol bounded_slope_tol r2_min stability_tol
//   [count]     regions bc threshold_factor skip
//   [run]       lambda p threads seed out eigenpair_budget
//
// Lists are comma separated. A missing lambda (or p) means the sweep grid
// (or p_values) is used by commands that accept several.
struct RunConfig {
  ModelParams model;
  SpectrumSpec spectrum;
  SweepConfig sweep;
  CountSettings count;
  std::optional<double> lambda;
  std::optional<double> p;
  std::size_t eigenpair_budget = kDefaultEigenpairBudget;
  std::string out = "out";

  int threads() const { return sweep.threads; }
  std::uint64_t seed() const { return sweep.seed; }

  // Throws ConfigError.
  void validate() const;
};

// Throw ConfigError on syntax errors, unknown keys or invalid values.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// INI text that parse_config maps back to the same RunConfig (reals at 17
// significant digits). threads and out are left out: they do not change any
// result, and outputs must not depend on them.
std::string echo_config(const RunConfig& config);

}  // namespace edgespec
