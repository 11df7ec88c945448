#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edgespec/boundary_spectrum.hpp"
#include "edgespec/counting.hpp"
#include "edgespec/density.hpp"
#include "edgespec/model_params.hpp"

namespace edgespec {

struct SweepConfig {
  double lambda_min = 100.0;
  double lambda_max = 1000.0;
  int points = 8;
  std::vector<double> p_values{1.0, 2.0};
  BRule b_rule{BRuleKind::HalfPower, 0.0};
  double slope_tol = 0.15;          // power-rate slopes
  double weyl_tol = 0.1;            // Weyl slope
  double bounded_slope_tol = 0.15;  // largest log-log growth of a ratio still called bounded
  double r2_min = 0.98;             // critical Weyl linearity
  double stability_tol = 0.3;       // relative change of an envelope ratio under lambda_max doubling
  int threads = 1;
  std::uint64_t seed = kDefaultSeed;

  // Requires lambda_min > e^2, lambda_max > lambda_min, points >= 4.
  void validate() const;
  std::vector<double> grid() const;
};

// Geometric grid with `points` entries from lo to hi inclusive.
std::vector<double> lambda_grid(double lo, double hi, int points);

// The grid continued with the same ratio until lambda_max has (about) doubled.
// The original grid is a prefix of the result.
std::vector<double> doubled_grid(std::span<const double> grid);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double r_squared = 0.0;
  std::optional<double> theory_slope;
};

// Ordinary least squares of log(value) on log(lambda). Needs >= 4 points and
// positive values. max_ratio / min_ratio are the extremes of the values.
FitResult loglog_fit(std::span<const std::pair<double, double>> points);

// Ordinary least squares of y on x (>= 2 points).
FitResult linear_fit(std::span<const std::pair<double, double>> points);

struct RatePoint {
  double lambda = 0.0;
  std::size_t n_lambda = 0;
  double rate = 0.0;         // A_lambda for this p
  double moment = 0.0;
  double wasserstein = 0.0;
  double ratio = 0.0;        // moment / rate
  double tail = 0.0;         // tail_mass at A_lambda (p = 1 only)
  double tail_ratio = 0.0;   // tail / rate (p = 1 only)
  // min over k0 <= 4/gamma + 2 of F_{k0+1} / lambda^{-1/2 + gamma}
  double bootstrap_constant = 0.0;
};

struct RateCheck {
  double p = 1.0;
  RateSpec rate;
  FitResult fit;         // moment against lambda
  FitResult ratio_fit;   // moment / rate against lambda
  FitResult tail_fit;    // tail / rate against lambda (p = 1 only)
  std::vector<RatePoint> rows;
  bool passed = false;
};

// Pass rules. Power rates: fitted moment slope within slope_tol of the
// exponent. Logarithmic rates: ratio finite with log-log slope at most
// bounded_slope_tol. For p = 1 the tail ratio must also be bounded in that sense.
RateCheck rate_check(const ModelParams& params, const SpectrumSpec& spectrum, const SweepConfig& config, double p);

// rate_check for several p values sharing one density per lambda.
std::vector<RateCheck> rate_checks(const ModelParams& params, const SpectrumSpec& spectrum, const SweepConfig& config,
                                   std::span<const double> p_values);

struct WeylCheck {
  bool critical = false;
  FitResult fit;  // log N on log lambda, or N / lambda^{(n+1)/2} on log lambda when critical
  std::vector<std::pair<double, std::size_t>> rows;
  bool passed = false;
};

WeylCheck weyl_check(const ModelParams& params, const SpectrumSpec& spectrum, const SweepConfig& config);

// Extreme envelope ratio of one region kind on the base grid and on the
// doubled grid. Upper bounds use the maximum, lower bounds the minimum.
struct EnvelopeStability {
  RegionKind kind = RegionKind::TailBeyond;
  Bc bc = Bc::Neumann;
  double base = 0.0;
  double extended = 0.0;
  double relative_change = 0.0;  // |extended / base - 1|, 0 when both vanish
  bool identically_zero = false;
  bool stable = false;
  std::vector<CountReport> rows;  // on the doubled grid
};

std::vector<EnvelopeStability> envelope_stability(const ModelParams& params, const SpectrumSpec& spectrum,
                                                  const SweepConfig& config, bool lower, double c_hat = 0.0);

enum class ChiShape { LinearRamp, SmoothstepCubic };

// Cutoff profiles. Ramp: 0 for x <= a, 1 for x >= b. Power: min(x^{p/2}, 1).
struct ChiSpec {
  enum class Mode { Ramp, Power };
  Mode mode = Mode::Power;
  double a = 0.0;
  double b = 1.0;
  ChiShape shape = ChiShape::LinearRamp;
  double power_p = 2.0;

  static ChiSpec ramp(double a, double b, ChiShape shape = ChiShape::LinearRamp);
  static ChiSpec power(double p);
  double operator()(double x) const;
};

struct LocalisationResult {
  double lambda = 0.0;
  std::size_t n_lambda = 0;
  double lhs = 0.0;         // sum over eigenfunctions below lambda of <phi, chi^2 phi>
  double trace_term = 0.0;  // sum over modes of the positive-part trace
  double error_term = 0.0;  // sum over eigenfunctions of the discrete |chi'|^2 term
  double rhs = 0.0;         // (trace_term + error_term) / lambda
  bool holds = false;
};

// Discrete localisation inequality on the whole model. Power mode uses
// Tr(chi (s - T) chi)_+ per mode; ramp mode uses Tr(s - T_a)_+ with T_a the
// Neumann operator on [a', x_max], a' the last mesh node at or below a.
// s = trace_shift_factor() * lambda.
LocalisationResult localisation_check(const ModelParams& params, const BoundarySpectrum& spectrum, double lambda,
                                      const ChiSpec& chi, const DensityOptions& options = {});

// Boundary cutoff localisation_check needs.
double localisation_mu_cutoff(const ModelParams& params, double lambda, const ChiSpec& chi);

// max |chi T chi - (chi^2 T + T chi^2)/2 + [chi,[chi,T]]/2| over entries,
// relative to the largest entry of the three terms, from dense products.
double ims_relative_residual(const SymTridiag& t, std::span<const double> chi);

// What the rate-sweep command reports: one RateCheck per p and the Weyl fit.
struct RateSweep {
  std::vector<RateCheck> rates;
  WeylCheck weyl;
  bool passed = false;
};

RateSweep rate_sweep(const ModelParams& params, const SpectrumSpec& spectrum, const SweepConfig& config);

}  // namespace edgespec
