#include "edgespec/cli.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "edgespec/counting.hpp"
#include "edgespec/density.hpp"
#include "edgespec/errors.hpp"
#include "edgespec/report_io.hpp"
#include "edgespec/verification.hpp"

namespace edgespec {

Command parse_command(const std::string& text) {
  if (text == "spectrum") return Command::Spectrum;
  if (text == "count") return Command::Count;
  if (text == "density") return Command::Density;
  if (text == "wasserstein") return Command::Wasserstein;
  if (text == "rate-sweep") return Command::RateSweep;
  if (text == "verify") return Command::Verify;
  throw ConfigError("unknown command '" + text + "'");
}

std::string to_string(Command command) {
  switch (command) {
    case Command::Spectrum:
      return "spectrum";
    case Command::Count:
      return "count";
    case Command::Density:
      return "density";
    case Command::Wasserstein:
      return "wasserstein";
    case Command::RateSweep:
      return "rate-sweep";
    case Command::Verify:
      break;
  }
  return "verify";
}

namespace {

namespace fs = std::filesystem;

struct Outputs {
  fs::path dir;
  std::ostream& log;

  void write(const std::string& name, const std::string& text) const {
    const fs::path path = dir / name;
    write_text_file(path.string(), text);
    log << "wrote " << path.string() << '\n';
  }
};

double single_lambda(const RunConfig& cfg, Command cmd) {
  if (!cfg.lambda) throw ConfigError(to_string(cmd) + " needs a single lambda (--lambda or run.lambda)");
  return *cfg.lambda;
}

std::vector<double> lambdas(const RunConfig& cfg) {
  if (cfg.lambda) return {*cfg.lambda};
  return cfg.sweep.grid();
}

BoundarySpectrum whole_model_spectrum(const RunConfig& cfg, double lambda_max, double factor = 1.0) {
  const double need = provable_mu_stop(cfg.model, {0.0, cfg.model.x_max}, factor * lambda_max);
  return cfg.spectrum.build(std::max(need, 1.0) * 1.000001);
}

int cmd_spectrum(const RunConfig& cfg, const Outputs& out) {
  const double lambda = single_lambda(cfg, Command::Spectrum);
  const auto spec = whole_model_spectrum(cfg, lambda);
  const auto eigs = model_eigenvalues(cfg.model, spec, lambda, cfg.threads(), cfg.eigenpair_budget);
  std::ostringstream csv;
  write_eigenvalues_csv(csv, eigs);
  out.write("eigenvalues.csv", csv.str());
  out.write("run_config.ini", echo_config(cfg));
  return kExitOk;
}

Region count_region(const RunConfig& cfg, RegionKind kind, double lambda) {
  if (kind == RegionKind::Whole) return Region{kind, cfg.model.x_max, cfg.model.outer_bc};
  return Region{kind, cfg.sweep.b_rule(cfg.model, lambda), cfg.count.bc};
}

int cmd_count(const RunConfig& cfg, const Outputs& out) {
  CountOptions opts;
  opts.threshold_factor = cfg.count.threshold_factor;
  opts.skip = cfg.count.skip;
  opts.threads = cfg.threads();
  const auto grid = lambdas(cfg);
  double cutoff = 1.0;
  for (double lam : grid) {
    for (RegionKind kind : cfg.count.regions) {
      cutoff = std::max(cutoff, required_mu_cutoff(cfg.model, count_region(cfg, kind, lam), lam, opts));
    }
  }
  const auto spec = cfg.spectrum.build(cutoff * 1.000001);
  std::vector<CountReport> rows;
  for (double lam : grid) {
    for (RegionKind kind : cfg.count.regions) {
      rows.push_back(region_count(cfg.model, spec, count_region(cfg, kind, lam), lam, opts));
    }
  }
  std::ostringstream csv;
  write_count_csv(csv, rows);
  out.write("counts.csv", csv.str());
  out.write("run_config.ini", echo_config(cfg));
  return kExitOk;
}

DensityOptions density_options(const RunConfig& cfg) {
  DensityOptions o;
  o.threads = cfg.threads();
  o.seed = cfg.seed();
  o.budget = cfg.eigenpair_budget;
  return o;
}

int cmd_density(const RunConfig& cfg, const Outputs& out) {
  const double lambda = single_lambda(cfg, Command::Density);
  const auto spec = whole_model_spectrum(cfg, lambda);
  const auto d = assemble_density(cfg.model, spec, lambda, density_options(cfg));
  out.log << fmt::format("N(lambda) = {}\n", d.n_lambda);
  std::ostringstream csv;
  write_density_csv(csv, d);
  out.write("density.csv", csv.str());
  out.write("run_config.ini", echo_config(cfg));
  return kExitOk;
}

int cmd_wasserstein(const RunConfig& cfg, const Outputs& out) {
  const auto grid = lambdas(cfg);
  const std::vector<double> ps = cfg.p ? std::vector<double>{*cfg.p} : cfg.sweep.p_values;
  const auto spec = whole_model_spectrum(cfg, *std::max_element(grid.begin(), grid.end()));
  Json reports = Json::array();
  for (double lam : grid) {
    const auto d = assemble_density(cfg.model, spec, lam, density_options(cfg));
    for (double p : ps) reports.push_back(to_json(moment_report(cfg.model, d, p)));
  }
  out.write("moments.json", dump(Json{{"config_echo", echo_config(cfg)}, {"reports", reports}}));
  return kExitOk;
}

int cmd_rate_sweep(const RunConfig& cfg, const Outputs& out) {
  const auto sweep = rate_sweep(cfg.model, cfg.spectrum, cfg.sweep);
  out.write("sweep.json", dump(rate_sweep_json(sweep, echo_config(cfg))));
  out.log << fmt::format("weyl slope {:.4f} ({})\n", sweep.weyl.fit.slope, sweep.weyl.passed ? "ok" : "FAIL");
  for (const auto& rc : sweep.rates) {
    out.log << fmt::format("p = {}: moment slope {:.4f}, max ratio {:.4g} ({})\n", rc.p, rc.fit.slope,
                           rc.ratio_fit.max_ratio, rc.passed ? "ok" : "FAIL");
  }
  return sweep.passed ? kExitOk : kExitInvariant;
}

int cmd_verify(const RunConfig& cfg, const Outputs& out) {
  const auto checks = run_verify_suite(cfg.model, cfg.spectrum, cfg.sweep);
  Json arr = Json::array();
  bool ok = true;
  for (const auto& c : checks) {
    arr.push_back(to_json(c));
    ok = ok && c.passed;
    out.log << fmt::format("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
  }
  out.write("verify.json", dump(Json{{"config_echo", echo_config(cfg)}, {"checks", arr}, {"passed", ok}}));
  return ok ? kExitOk : kExitInvariant;
}

}  // namespace

int run(Command command, const RunConfig& config, std::ostream& log) {
  try {
    config.validate();
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + config.out + "': " + ec.message());
    const Outputs out{fs::path(config.out), log};
    switch (command) {
      case Command::Spectrum:
        return cmd_spectrum(config, out);
      case Command::Count:
        return cmd_count(config, out);
      case Command::Density:
        return cmd_density(config, out);
      case Command::Wasserstein:
        return cmd_wasserstein(config, out);
      case Command::RateSweep:
        return cmd_rate_sweep(config, out);
      case Command::Verify:
        return cmd_verify(config, out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    log << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ConvergenceError& e) {
    log << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::domain_error& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

}  // namespace edgespec
