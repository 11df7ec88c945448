// Command-line front end: parses flags, merges them over the config file and
// hands off to edgespec::run.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "edgespec/cli.hpp"
#include "edgespec/config.hpp"
#include "edgespec/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue counting and eigenfunction concentration for singular edge metrics"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::optional<double> lambda, p, beta;
  std::optional<int> n, threads;
  std::optional<std::string> out;
  std::optional<unsigned long long> seed;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--lambda", lambda, "spectral cutoff");
  app.add_option("--p", p, "moment order (1 or >= 2)");
  app.add_option("--beta", beta, "singularity exponent");
  app.add_option("--n", n, "dimension of the boundary manifold");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "seed for inverse-iteration starts");

  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "list model eigenvalues below lambda"},
      {"count", "eigenvalue counts per region"},
      {"density", "radial eigenfunction density at lambda"},
      {"wasserstein", "moments and Wasserstein distances to the boundary"},
      {"rate-sweep", "rate and Weyl fits over the lambda grid"},
      {"verify", "invariant suite"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? edgespec::kExitOk : edgespec::kExitConfig;
  }

  edgespec::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = edgespec::load_config(config_path);
  } catch (const edgespec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return edgespec::kExitConfig;
  }
  if (lambda) cfg.lambda = *lambda;
  if (p) cfg.p = *p;
  if (beta) cfg.model.beta = *beta;
  if (n) cfg.model.n = *n;
  if (threads) cfg.sweep.threads = *threads;
  if (out) cfg.out = *out;
  if (seed) cfg.sweep.seed = *seed;
  cfg.spectrum.n = cfg.model.n;

  const auto* sub = app.get_subcommands().front();
  return edgespec::run(edgespec::parse_command(sub->get_name()), cfg, std::cerr);
}
