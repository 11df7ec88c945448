// Acceptance suite: one PASS/FAIL line per criterion. With arguments, only
// the listed criterion numbers run.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "edgespec/analysis.hpp"
#include "edgespec/cli.hpp"
#include "edgespec/config.hpp"
#include "edgespec/radial_solver.hpp"
#include "edgespec/verification.hpp"
#include "oracles.hpp"

using namespace edgespec;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> body;
};

ModelParams model(double beta) {
  ModelParams p;
  p.beta = beta;
  return p;
}

SweepConfig sweep(double lo, double hi, int points) {
  SweepConfig s;
  s.lambda_min = lo;
  s.lambda_max = hi;
  s.points = points;
  return s;
}

const double kSupHi = std::pow(10.0, 3.5);

// Sweeps reused by several criteria, computed on first use.
const RateSweep& supercritical_sweep() {
  static const RateSweep s = rate_sweep(model(4.0), SpectrumSpec{}, sweep(100.0, kSupHi, 8));
  return s;
}

const RateSweep& critical_sweep() {
  static const RateSweep s = [] {
    SweepConfig c = sweep(100.0, 1e4, 8);
    c.p_values = {1.0, 2.0};
    return rate_sweep(model(2.0), SpectrumSpec{}, c);
  }();
  return s;
}

bool bounded(const FitResult& f, const SweepConfig& c) {
  return std::isfinite(f.max_ratio) && f.min_ratio > 0.0 && f.slope <= c.bounded_slope_tol;
}

Outcome oracle_equivalence() {
  const auto r = check_oracle_equivalence(kSeed, 100, 10, 200);
  return {r.passed, r.detail};
}

Outcome discretization_order() {
  const BoundaryCondition dd{Bc::Dirichlet, Bc::Dirichlet};
  const RadialPotential free{0.0, 0.0, 2.0};
  const Interval iv{0.0, std::numbers::pi};
  double worst = 0.0;
  for (int m : {100, 400, 1000}) {
    const auto exact = oracle::discrete_dirichlet_laplacian(static_cast<std::size_t>(m), iv.length());
    const auto got = eigenvalues_below(assemble_radial(free, iv, dd, m).matrix, 100.0);
    for (std::size_t k = 0; k < got.size(); ++k) {
      worst = std::max(worst, std::abs(got[k] - exact[k]) / std::max(1.0, exact[k]));
    }
  }
  bool ok = worst <= 1e-10;
  std::string slopes;
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> err;
    for (int cells : {50, 100, 200, 400, 800}) {
      const auto e = eigenvalues_below(assemble_radial(free, iv, dd, cells - 1).matrix, 10.0);
      err.push_back(std::abs(e[static_cast<std::size_t>(k - 1)] - k * k));
    }
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
      const double s = std::log2(err[i] / err[i + 1]);
      ok = ok && std::abs(s - 2.0) <= 0.2;
      if (i + 2 == err.size()) slopes += fmt::format(" k={}:{:.4f}", k, s);
    }
  }
  return {ok, fmt::format("max rel. deviation from closed form {:.2e}; finest Richardson slopes{}", worst, slopes)};
}

Outcome scaling_identity() {
  const auto a = check_scaling_identity(model(2.0), kSeed, 50);
  const auto b = check_scaling_identity(model(4.0), kSeed + 1, 50);
  return {a.passed && b.passed, "beta=2: " + a.detail + "; beta=4: " + b.detail};
}

Outcome core_zero() {
  const auto grid = lambda_grid(100.0, 1e4, 20);
  const auto a = check_core_zero_count(model(2.0), SpectrumSpec{}, grid, 1);
  const auto b = check_core_zero_count(model(4.0), SpectrumSpec{}, grid, 1);
  return {a.passed && b.passed, "beta=2: " + a.detail + "; beta=4: " + b.detail};
}

Outcome weyl_slope() {
  const auto& sup = supercritical_sweep().weyl;
  const auto& crit = critical_sweep().weyl;
  const bool ok = sup.fit.slope >= 1.4 && sup.fit.slope <= 1.6 && crit.fit.r_squared >= 0.98;
  return {ok, fmt::format("beta=4 slope {:.4f} (N from {} to {}); beta=2 N/lambda vs log lambda r^2 {:.5f}, slope {:.4g}",
                          sup.fit.slope, sup.rows.front().second, sup.rows.back().second, crit.fit.r_squared,
                          crit.fit.slope)};
}

std::string describe(const std::vector<EnvelopeStability>& st, bool lower) {
  std::string s;
  for (const auto& e : st) {
    s += fmt::format(" {} {}: {} {:.4g} -> {:.4g} ({:+.1f}%){}{};", to_string(e.kind), to_string(e.bc),
                     lower ? "min" : "max", e.base, e.extended, 100.0 * e.relative_change,
                     e.identically_zero ? " identically zero" : "", e.stable ? "" : " UNSTABLE");
  }
  return s;
}

Outcome upper_envelopes() {
  const ModelParams p = model(4.0);
  SweepConfig half = sweep(100.0, kSupHi, 8);
  const auto a = envelope_stability(p, SpectrumSpec{}, half, false);
  SweepConfig scaled = half;
  scaled.b_rule = BRule{BRuleKind::Scaled, 5.0};
  const auto b = envelope_stability(p, SpectrumSpec{}, scaled, false);
  bool ok = true;
  for (const auto& e : a) ok = ok && e.stable;
  for (const auto& e : b) ok = ok && e.stable && !e.identically_zero;
  return {ok, "half_power:" + describe(a, false) + " scaled:5:" + describe(b, false)};
}

Outcome lower_envelopes() {
  SweepConfig c = sweep(100.0, kSupHi, 8);
  c.b_rule = BRule{BRuleKind::Scaled, 5.0};
  const auto st = envelope_stability(model(4.0), SpectrumSpec{}, c, true, 5.0);
  bool ok = true;
  for (const auto& e : st) ok = ok && e.stable && e.base > 0.0 && e.extended > 0.0;
  return {ok, "scaled:5, c_hat=5, Dirichlet:" + describe(st, true)};
}

const RateCheck& rate_for(const RateSweep& s, double p) {
  for (const auto& r : s.rates) {
    if (r.p == p) return r;
  }
  throw std::logic_error("rate not in sweep");
}

Outcome main_rate() {
  const auto& rc = rate_for(supercritical_sweep(), 1.0);
  const SweepConfig c;
  const bool slope_ok = std::abs(rc.fit.slope + 0.25) <= 0.15;
  const bool tail_ok = bounded(rc.tail_fit, c);
  return {slope_ok && tail_ok,
          fmt::format("moment slope {:.4f} (theory -0.25); tail/A max {:.4g}, log-log slope {:.4f}", rc.fit.slope,
                      rc.tail_fit.max_ratio, rc.tail_fit.slope)};
}

Outcome moment_rates() {
  const auto& sup = rate_for(supercritical_sweep(), 2.0);
  const auto& crit = rate_for(critical_sweep(), 2.0);
  const SweepConfig c;
  const bool ok = std::abs(sup.fit.slope + 0.5) <= 0.15 && bounded(crit.ratio_fit, c);
  return {ok, fmt::format("beta=4 p=2 slope {:.4f} (theory -0.5); beta=2 p=2 moment*log(lambda) in [{:.4g}, {:.4g}], "
                          "log-log slope {:.4f} (boundedness only, no slope claim)",
                          sup.fit.slope, crit.ratio_fit.min_ratio, crit.ratio_fit.max_ratio, crit.ratio_fit.slope)};
}

Outcome localisation() {
  const auto grid = lambda_grid(100.0, 1000.0, 10);
  const auto a = check_localisation(model(2.0), SpectrumSpec{}, grid, 1, kSeed);
  const auto b = check_localisation(model(4.0), SpectrumSpec{}, grid, 1, kSeed);
  return {a.passed && b.passed, "beta=2: " + a.detail + "; beta=4: " + b.detail};
}

Outcome ims() {
  const auto r = check_ims_identity(kSeed, 100, 1e-12);
  return {r.passed, r.detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "edgespec_acceptance_determinism";
  fs::remove_all(root);
  RunConfig cfg;
  std::ostringstream log;
  std::vector<std::string> outputs;
  for (int threads : {1, 8}) {
    cfg.sweep.threads = threads;
    cfg.out = (root / fmt::format("t{}", threads)).string();
    const int code = run(Command::RateSweep, cfg, log);
    if (code != kExitOk) return {false, fmt::format("rate-sweep with {} threads exited {}: {}", threads, code, log.str())};
    outputs.push_back(slurp(fs::path(cfg.out) / "sweep.json"));
  }
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
  return {same, fmt::format("sweep.json {} bytes, threads 1 vs 8 {}", outputs[0].size(), same ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "oracle equivalence", 10, oracle_equivalence},
      {2, "discretization order", 5, discretization_order},
      {3, "scaling identity", 10, scaling_identity},
      {4, "core carries no eigenvalue below 3 lambda", 60, core_zero},
      {5, "Weyl growth", 600, weyl_slope},
      {6, "counting envelopes", 600, upper_envelopes},
      {7, "optimality floors", 600, lower_envelopes},
      {8, "first-moment rate", 900, main_rate},
      {9, "higher-moment rates", 900, moment_rates},
      {10, "localisation inequality", 600, localisation},
      {11, "discrete IMS identity", 5, ims},
      {12, "determinism across thread counts", 1200, determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool ok = o.passed && in_time;
    if (!ok) ++failures;
    std::cout << fmt::format("{} [{:2}] {}: {} ({:.2f} s, budget {:.0f} s{})\n", ok ? "PASS" : "FAIL", c.id, c.name,
                             o.detail, secs, c.budget_s, in_time ? "" : ", OVER BUDGET")
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
