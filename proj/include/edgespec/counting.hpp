#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "edgespec/boundary_spectrum.hpp"
#include "edgespec/model_params.hpp"
#include "edgespec/radial_solver.hpp"

namespace edgespec {

// Radial pieces of the cylinder (0, x_max] x M.
//   TailBeyond(B)   [B, x_max]
//   DyadicShell(B)  [B, 2B]
//   Core(B)         (0, B]
//   Whole           (0, x_max]
// `bc` applies at the cut points B and 2B. The outer end x_max always uses
// ModelParams::outer_bc and the singular end x = 0 the Dirichlet cutoff.
enum class RegionKind { TailBeyond, DyadicShell, Core, Whole };

struct Region {
  RegionKind kind = RegionKind::Whole;
  double B = 0.0;
  Bc bc = Bc::Neumann;
};

Interval region_interval(const ModelParams& params, const Region& region);
BoundaryCondition region_bc(const ModelParams& params, const Region& region);

std::string to_string(RegionKind kind);
RegionKind parse_region_kind(const std::string& text);

struct CountReport {
  double lambda = 0.0;
  Region region;
  std::size_t count = 0;
  double bound_value = 0.0;  // envelope; 0 when the region has none
  double ratio = 0.0;        // count / bound_value, or count when bound_value = 0
  std::size_t j_used = 0;    // boundary modes assembled, with multiplicity
};

// mu* = lambda / min(B, x_max)^beta: mu B^beta >= lambda forces P_mu >= lambda on [B, x_max].
double j_cutoff(const ModelParams& params, double B, double lambda);

// Smallest mu (up to a relative 1e-12 safety margin) such that
// min_{x in interval} C_beta/x^2 + mu x^beta >= threshold. Every mode at or
// beyond it has no eigenvalue below threshold, for the continuum operator and
// for the discrete matrix alike (the kinetic part is positive semidefinite).
// Returns 0 when even mu = 0 clears the threshold.
double provable_mu_stop(const ModelParams& params, Interval interval, double threshold);

enum class SkipPolicy {
  Provable,   // assemble only modes below provable_mu_stop
  Exhaustive  // also assemble every mode below threshold / a^beta (a the inner cut, or B for Core)
};

struct CountOptions {
  double threshold_factor = 1.0;  // eigenvalues are counted below threshold_factor * lambda
  SkipPolicy skip = SkipPolicy::Provable;
  int threads = 1;
};

// Boundary-spectrum cutoff region_count needs for these arguments.
double required_mu_cutoff(const ModelParams& params, const Region& region, double lambda,
                          const CountOptions& options = {});

// Envelope for the region, evaluated at lambda:
//   tail, beta n > 2:   lambda^{(n+1)/2} B^{1 - beta n / 2}
//   tail, beta n = 2:   lambda^{(n+1)/2} (1 + |log B|)
//   shell:              lambda^{(n+1)/2} B^{1 - beta n / 2}
//   whole, beta n > 2:  lambda^{d/2}
//   whole, beta n = 2:  lambda^{(n+1)/2} log lambda
//   core:               0
double envelope(const ModelParams& params, const Region& region, double lambda);

// Sum over boundary modes of the radial eigenvalue counts below
// threshold_factor * lambda. Throws SpectrumIncompleteError if the spectrum
// cutoff is below required_mu_cutoff.
CountReport region_count(const ModelParams& params, const BoundarySpectrum& spectrum, const Region& region,
                         double lambda, const CountOptions& options = {});

// N(lambda) on the whole model.
std::size_t total_count(const ModelParams& params, const BoundarySpectrum& spectrum, double lambda, int threads = 1);

// Rules for the cut point B as a function of lambda.
enum class BRuleKind {
  Bootstrap,  // lambda^{-1/2 + gamma} / (4/gamma + 3), gamma = 1/(n beta)
  HalfPower,  // lambda^{-1/2} / 2
  Scaled,     // value * lambda^{-1/2}
  Fixed       // value
};

struct BRule {
  BRuleKind kind = BRuleKind::HalfPower;
  double value = 0.0;

  double operator()(const ModelParams& params, double lambda) const;
};

std::string to_string(const BRule& rule);
// "bootstrap", "half_power", "scaled:C" or "fixed:B".
BRule parse_b_rule(const std::string& text);

double bootstrap_gamma(const ModelParams& params);
double bootstrap_B(const ModelParams& params, double lambda);

// Tail and shell counts with bc at the cut, for every lambda. Requires
// lambda^{-1/2}/2 <= B <= eps/2.
std::vector<CountReport> verify_upper_bounds(const ModelParams& params, const SpectrumSpec& spectrum,
                                             std::span<const double> lambda_grid, const BRule& rule,
                                             const CountOptions& options = {});

// Dirichlet tail and shell counts. Requires B >= c_hat lambda^{-1/2},
// C_beta / B^2 <= lambda / 2 and 2B <= x_max.
std::vector<CountReport> verify_lower_bounds(const ModelParams& params, const SpectrumSpec& spectrum,
                                             std::span<const double> lambda_grid, const BRule& rule, double c_hat,
                                             const CountOptions& options = {});

// One radial eigenvalue of the whole model.
struct ModelEigenvalue {
  double mu;                  // boundary eigenvalue
  std::size_t multiplicity;   // of mu in the boundary spectrum
  std::size_t k;              // radial index, 0-based
  double alpha;               // eigenvalue of the whole-model matrix for mode mu
};

// Every eigenvalue of the whole model below lambda, ordered by (mu, k).
std::vector<ModelEigenvalue> model_eigenvalues(const ModelParams& params, const BoundarySpectrum& spectrum,
                                               double lambda, int threads = 1, std::size_t budget = kNoBudget);

}  // namespace edgespec
