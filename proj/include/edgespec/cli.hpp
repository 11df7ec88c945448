#pragma once

#include <iosfwd>
#include <string>

#include "edgespec/config.hpp"

namespace edgespec {

enum class Command { Spectrum, Count, Density, Wasserstein, RateSweep, Verify };

Command parse_command(const std::string& text);
std::string to_string(Command command);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;

// Runs one command and writes its artifacts into config.out:
//   spectrum     eigenvalues.csv, run_config.ini
//   count        counts.csv, run_config.ini
//   density      density.csv, run_config.ini
//   wasserstein  moments.json
//   rate-sweep   sweep.json
//   verify       verify.json
// Diagnostics go to `log`. Returns one of the exit codes above; errors are
// reported on `log`, never thrown.
int run(Command command, const RunConfig& config, std::ostream& log);

}  // namespace edgespec
