#include "edgespec/verification.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>

#include "edgespec/counting.hpp"
#include "edgespec/density.hpp"

namespace edgespec {

double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

SymTridiag random_tridiag(std::mt19937_64& rng, std::size_t m) {
  SymTridiag t;
  t.diag.resize(m);
  t.offdiag.resize(m > 0 ? m - 1 : 0);
  for (double& d : t.diag) d = 5.0 * uniform_pm1(rng);
  for (double& e : t.offdiag) e = 2.0 * uniform_pm1(rng);
  return t;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + 0.5 * (uniform_pm1(rng) + 1.0) * (hi - lo); }

}  // namespace

CheckResult check_oracle_equivalence(std::uint64_t seed, int instances, int thresholds, std::size_t max_m) {
  CheckResult r{"oracle_equivalence", true, ""};
  std::mt19937_64 rng(seed);
  int mismatches = 0;
  for (int inst = 0; inst < instances; ++inst) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng() % max_m);
    const SymTridiag t = random_tridiag(rng, m);
    const auto eigs = dense_oracle_eigs(t);
    for (int k = 0; k < thresholds; ++k) {
      const double lam = uniform(rng, t.gershgorin_lower() - 1.0, t.gershgorin_upper() + 1.0);
      const auto expect = static_cast<std::size_t>(std::count_if(eigs.begin(), eigs.end(), [&](double a) { return a < lam; }));
      if (sturm_count(t, lam) != expect) ++mismatches;
    }
  }
  r.passed = mismatches == 0;
  r.detail = fmt::format("{} instances x {} thresholds, {} mismatches", instances, thresholds, mismatches);
  return r;
}

CheckResult check_scaling_identity(const ModelParams& params, std::uint64_t seed, int triples) {
  CheckResult r{"scaling_identity", true, ""};
  std::mt19937_64 rng(seed);
  const double c = params.c_beta();
  int mismatches = 0;
  for (int i = 0; i < triples; ++i) {
    const double mu = std::exp(uniform(rng, std::log(0.5), std::log(1e5)));
    const double a = uniform(rng, 0.0, 0.5) * params.x_max;
    const double b = a + uniform(rng, 0.1, 1.0) * (params.x_max - a);
    const BoundaryCondition bc{a == 0.0 ? Bc::Dirichlet : (rng() % 2 ? Bc::Neumann : Bc::Dirichlet),
                               rng() % 2 ? Bc::Neumann : Bc::Dirichlet};
    const int nodes = 16 + static_cast<int>(rng() % 200);
    const Interval iv{a, b};
    const TridiagOperator op = assemble_radial(RadialPotential{c, mu, params.beta}, iv, bc, nodes);
    const RescaledProblem rp = rescaled_problem(params, mu, iv);
    const TridiagOperator mapped =
        assemble_on_mesh(RadialPotential{c, 1.0, params.beta}, op.mesh.scaled(rp.length_scale), bc, rp.interval);
    const auto eigs = eigenvalues_below(op.matrix, op.matrix.gershgorin_upper() + 1.0);
    // A threshold between two eigenvalues keeps ties away from rounding.
    const std::size_t k = rng() % eigs.size();
    const double lam = k + 1 < eigs.size() ? 0.5 * (eigs[k] + eigs[k + 1]) : eigs[k] + 1.0;
    if (sturm_count(op.matrix, lam) != sturm_count(mapped.matrix, lam / rp.lambda_scale)) ++mismatches;
  }
  r.passed = mismatches == 0;
  r.detail = fmt::format("{} triples, {} mismatches", triples, mismatches);
  return r;
}

CheckResult check_ims_identity(std::uint64_t seed, int cases, double tol) {
  CheckResult r{"ims_identity", true, ""};
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < cases; ++i) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng() % 60);
    const SymTridiag t = random_tridiag(rng, m);
    std::vector<double> chi(m);
    for (double& x : chi) x = 0.5 * (uniform_pm1(rng) + 1.0);
    worst = std::max(worst, ims_relative_residual(t, chi));
  }
  r.passed = worst <= tol;
  r.detail = fmt::format("{} cases, worst relative residual {:.3e}", cases, worst);
  return r;
}

CheckResult check_core_zero_count(const ModelParams& params, const SpectrumSpec& spectrum,
                                  const std::vector<double>& grid, int threads) {
  CheckResult r{"core_zero_count", true, ""};
  CountOptions opts;
  opts.threshold_factor = 3.0;
  opts.skip = SkipPolicy::Exhaustive;
  opts.threads = threads;
  double cutoff = 1.0;
  for (double lam : grid) {
    cutoff = std::max(cutoff, required_mu_cutoff(params, Region{RegionKind::Core, 0.5 / std::sqrt(lam), Bc::Neumann},
                                                 lam, opts));
  }
  const BoundarySpectrum spec = spectrum.build(cutoff * (1.0 + 1e-9));
  std::size_t worst = 0, modes = 0;
  for (double lam : grid) {
    const auto rep = region_count(params, spec, Region{RegionKind::Core, 0.5 / std::sqrt(lam), Bc::Neumann}, lam, opts);
    worst = std::max(worst, rep.count);
    modes += rep.j_used;
  }
  r.passed = worst == 0;
  r.detail = fmt::format("{} lambdas, {} modes assembled, largest count {}", grid.size(), modes, worst);
  return r;
}

CheckResult check_localisation(const ModelParams& params, const SpectrumSpec& spectrum,
                               const std::vector<double>& grid, int threads, std::uint64_t seed) {
  CheckResult r{"localisation", true, ""};
  DensityOptions opts;
  opts.threads = threads;
  opts.seed = seed;
  const RateSpec rate = theoretical_rate(params, 1.0);
  int failures = 0, total = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (double lam : grid) {
    const double A = eval_rate(rate, lam);
    for (const ChiSpec& chi : {ChiSpec::ramp(0.5 * A, A), ChiSpec::power(2.0), ChiSpec::power(3.0)}) {
      const BoundarySpectrum spec = spectrum.build(std::max(localisation_mu_cutoff(params, lam, chi), 1.0) * 1.000001);
      const auto res = localisation_check(params, spec, lam, chi, opts);
      ++total;
      if (!res.holds) ++failures;
      min_margin = std::min(min_margin, res.rhs / res.lhs);
    }
  }
  r.passed = failures == 0;
  r.detail = fmt::format("{} checks, {} failures, smallest rhs/lhs {:.4g}", total, failures, min_margin);
  return r;
}

CheckResult check_skip_soundness(const ModelParams& params, std::uint64_t seed, int samples) {
  CheckResult r{"skip_soundness", true, ""};
  std::mt19937_64 rng(seed);
  int violations = 0;
  for (int i = 0; i < samples; ++i) {
    const double lam = std::exp(uniform(rng, std::log(10.0), std::log(1e4)));
    const double a = rng() % 3 == 0 ? 0.0 : uniform(rng, 0.01, 0.5) * params.x_max;
    const Interval iv{a, params.x_max};
    const double stop = provable_mu_stop(params, iv, lam);
    const double mu = stop * (1.0 + std::abs(uniform_pm1(rng)));
    const BoundaryCondition bc{a == 0.0 ? Bc::Dirichlet : Bc::Neumann, Bc::Neumann};
    const RadialFamily fam(params, iv, bc, mesh_nodes_for(params, iv, lam));
    if (mu > 0.0 && fam.count(mu, lam) != 0) ++violations;
  }
  r.passed = violations == 0;
  r.detail = fmt::format("{} skipped modes sampled, {} with nonzero count", samples, violations);
  return r;
}

CheckResult check_bracketing(const ModelParams& params, std::uint64_t seed, int samples) {
  CheckResult r{"bracketing", true, ""};
  std::mt19937_64 rng(seed);
  int violations = 0;
  for (int i = 0; i < samples; ++i) {
    const double a = uniform(rng, 0.01, 0.5) * params.x_max;
    const Interval iv{a, params.x_max};
    const double mu = std::exp(uniform(rng, 0.0, std::log(1e5)));
    const int nodes = 16 + static_cast<int>(rng() % 300);
    const RadialFamily dir(params, iv, {Bc::Dirichlet, Bc::Dirichlet}, nodes);
    const RadialFamily neu(params, iv, {Bc::Neumann, Bc::Neumann}, nodes);
    const double lam = std::exp(uniform(rng, std::log(10.0), std::log(1e5)));
    if (dir.count(mu, lam) > neu.count(mu, lam)) ++violations;
  }
  r.passed = violations == 0;
  r.detail = fmt::format("{} instances, {} with Dirichlet above Neumann", samples, violations);
  return r;
}

std::vector<CheckResult> run_verify_suite(const ModelParams& params, const SpectrumSpec& spectrum,
                                          const SweepConfig& sweep) {
  params.validate();
  sweep.validate();
  const auto grid = sweep.grid();
  std::vector<CheckResult> out;
  out.push_back(check_oracle_equivalence(sweep.seed));
  out.push_back(check_scaling_identity(params, sweep.seed + 1));
  out.push_back(check_ims_identity(sweep.seed + 2));
  out.push_back(check_core_zero_count(params, spectrum, grid, sweep.threads));
  out.push_back(check_localisation(params, spectrum, grid, sweep.threads, sweep.seed));
  out.push_back(check_skip_soundness(params, sweep.seed + 3));
  out.push_back(check_bracketing(params, sweep.seed + 4));
  return out;
}

}  // namespace edgespec
