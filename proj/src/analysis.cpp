#include "edgespec/analysis.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "edgespec/errors.hpp"
#include "edgespec/parallel.hpp"

namespace edgespec {

void SweepConfig::validate() const {
  const double e2 = std::numbers::e * std::numbers::e;
  if (!(lambda_min > e2)) throw std::domain_error(fmt::format("sweep: lambda_min = {} must exceed e^2", lambda_min));
  if (!(lambda_max > lambda_min)) throw std::domain_error("sweep: lambda_max must exceed lambda_min");
  if (points < 4) throw std::domain_error("sweep: need at least 4 grid points");
  if (threads < 1) throw std::domain_error("sweep: threads must be >= 1");
  for (double p : p_values) {
    if (!(p == 1.0 || p >= 2.0)) throw std::domain_error(fmt::format("sweep: p = {} is not 1 or >= 2", p));
  }
}

std::vector<double> SweepConfig::grid() const { return lambda_grid(lambda_min, lambda_max, points); }

std::vector<double> lambda_grid(double lo, double hi, int points) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw std::domain_error("lambda_grid: need 0 < lo < hi and points >= 2");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double l0 = std::log(lo);
  const double step = (std::log(hi) - l0) / (points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(l0 + i * step);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> doubled_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw std::domain_error("doubled_grid: need at least 2 points");
  const double l0 = std::log(grid.front());
  const double step = (std::log(grid.back()) - l0) / static_cast<double>(grid.size() - 1);
  const auto extra = static_cast<std::size_t>(std::max(1.0, std::round(std::log(2.0) / step)));
  std::vector<double> out(grid.begin(), grid.end());
  for (std::size_t i = 1; i <= extra; ++i) {
    out.push_back(std::exp(std::log(grid.back()) + static_cast<double>(i) * step));
  }
  return out;
}

FitResult linear_fit(std::span<const std::pair<double, double>> points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::domain_error("linear_fit: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw std::domain_error("linear_fit: abscissae must not all coincide");
  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  r.max_ratio = -std::numeric_limits<double>::infinity();
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) {
    r.max_ratio = std::max(r.max_ratio, pt.second);
    r.min_ratio = std::min(r.min_ratio, pt.second);
  }
  return r;
}

FitResult loglog_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw std::domain_error("loglog_fit: need at least 4 points");
  std::vector<std::pair<double, double>> logs;
  logs.reserve(points.size());
  for (const auto& [lambda, v] : points) {
    if (!(lambda > 0.0) || !(v > 0.0)) {
      throw std::domain_error(fmt::format("loglog_fit: nonpositive entry ({}, {})", lambda, v));
    }
    logs.emplace_back(std::log(lambda), std::log(v));
  }
  FitResult r = linear_fit(logs);
  r.max_ratio = -std::numeric_limits<double>::infinity();
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) {
    r.max_ratio = std::max(r.max_ratio, pt.second);
    r.min_ratio = std::min(r.min_ratio, pt.second);
  }
  return r;
}

namespace {

FitResult fit_values(std::span<const double> lambdas, std::span<const double> values) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < lambdas.size(); ++i) pts.emplace_back(lambdas[i], values[i]);
  return loglog_fit(pts);
}

bool bounded(const FitResult& f, double tol) {
  return std::isfinite(f.max_ratio) && f.max_ratio > 0.0 && f.slope <= tol;
}

std::vector<RadialDensity> sweep_densities(const ModelParams& params, const SpectrumSpec& spec,
                                           std::span<const double> grid, const SweepConfig& config) {
  const Interval whole{0.0, params.x_max};
  const BoundarySpectrum spectrum = spec.build(std::max(provable_mu_stop(params, whole, grid.back()), 1.0) * 1.000001);
  DensityOptions opts;
  opts.threads = config.threads;
  opts.seed = config.seed;
  std::vector<RadialDensity> out;
  out.reserve(grid.size());
  for (double lambda : grid) out.push_back(assemble_density(params, spectrum, lambda, opts));
  return out;
}

RateCheck rate_from_densities(const ModelParams& params, const SweepConfig& config,
                              std::span<const RadialDensity> densities, double p) {
  RateCheck rc;
  rc.p = p;
  rc.rate = theoretical_rate(params, p);
  const double gamma = bootstrap_gamma(params);
  std::vector<double> lambdas, moments, ratios, tail_ratios;
  for (const auto& d : densities) {
    RatePoint pt;
    pt.lambda = d.lambda;
    pt.n_lambda = d.n_lambda;
    pt.rate = eval_rate(rc.rate, d.lambda);
    pt.moment = moment_p(d, p);
    pt.wasserstein = wasserstein_to_boundary(d, p);
    pt.ratio = pt.moment / pt.rate;
    if (p == 1.0) {
      pt.tail = tail_mass(d, pt.rate);
      pt.tail_ratio = pt.tail / pt.rate;
    }
    const auto tails = tail_sequence(d, bootstrap_B(params, d.lambda), bootstrap_k_max(params));
    const double scale = std::pow(d.lambda, -0.5 + gamma);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < tails.size(); ++k) best = std::min(best, tails[k] / scale);
    pt.bootstrap_constant = best;
    lambdas.push_back(pt.lambda);
    moments.push_back(pt.moment);
    ratios.push_back(pt.ratio);
    tail_ratios.push_back(pt.tail_ratio);
    rc.rows.push_back(pt);
  }
  rc.fit = fit_values(lambdas, moments);
  rc.ratio_fit = fit_values(lambdas, ratios);
  if (rc.rate.is_power()) {
    rc.fit.theory_slope = rc.rate.exponent;
    rc.passed = std::abs(rc.fit.slope - rc.rate.exponent) <= config.slope_tol;
  } else {
    rc.passed = bounded(rc.ratio_fit, config.bounded_slope_tol);
  }
  if (p == 1.0) {
    const bool any_tail = std::any_of(tail_ratios.begin(), tail_ratios.end(), [](double v) { return v > 0.0; });
    if (any_tail && std::all_of(tail_ratios.begin(), tail_ratios.end(), [](double v) { return v > 0.0; })) {
      rc.tail_fit = fit_values(lambdas, tail_ratios);
      rc.passed = rc.passed && bounded(rc.tail_fit, config.bounded_slope_tol);
    } else {
      // A vanishing tail is trivially bounded; report its extremes only.
      rc.tail_fit.max_ratio = *std::max_element(tail_ratios.begin(), tail_ratios.end());
      rc.tail_fit.min_ratio = *std::min_element(tail_ratios.begin(), tail_ratios.end());
    }
  }
  return rc;
}

WeylCheck weyl_from_counts(const ModelParams& params, const SweepConfig& config,
                           std::vector<std::pair<double, std::size_t>> rows) {
  WeylCheck w;
  w.critical = params.critical();
  w.rows = std::move(rows);
  std::vector<std::pair<double, double>> pts;
  for (const auto& [lambda, n] : w.rows) {
    if (w.critical) {
      pts.emplace_back(std::log(lambda), static_cast<double>(n) / std::pow(lambda, (params.n + 1.0) / 2.0));
    } else {
      pts.emplace_back(lambda, static_cast<double>(n));
    }
  }
  if (w.critical) {
    w.fit = linear_fit(pts);
    w.passed = w.fit.r_squared >= config.r2_min && w.fit.slope > 0.0;
  } else {
    w.fit = loglog_fit(pts);
    w.fit.theory_slope = params.d() / 2.0;
    w.passed = std::abs(w.fit.slope - params.d() / 2.0) <= config.weyl_tol;
  }
  return w;
}

}  // namespace

RateCheck rate_check(const ModelParams& params, const SpectrumSpec& spectrum, const SweepConfig& config, double p) {
  const double ps[] = {p};
  return rate_checks(params, spectrum, config, ps).front();
}

std::vector<RateCheck> rate_checks(const ModelParams& params, const SpectrumSpec& spectrum, const SweepConfig& config,
                                   std::span<const double> p_values) {
  params.validate();
  config.validate();
  for (double p : p_values) theoretical_rate(params, p);
  const auto grid = config.grid();
  const auto densities = sweep_densities(params, spectrum, grid, config);
  std::vector<RateCheck> out;
  for (double p : p_values) out.push_back(rate_from_densities(params, config, densities, p));
  return out;
}

WeylCheck weyl_check(const ModelParams& params, const SpectrumSpec& spectrum, const SweepConfig& config) {
  params.validate();
  config.validate();
  const auto grid = config.grid();
  const BoundarySpectrum spec =
      spectrum.build(std::max(provable_mu_stop(params, {0.0, params.x_max}, grid.back()), 1.0) * 1.000001);
  std::vector<std::pair<double, std::size_t>> rows;
  for (double lambda : grid) rows.emplace_back(lambda, total_count(params, spec, lambda, config.threads));
  return weyl_from_counts(params, config, std::move(rows));
}

RateSweep rate_sweep(const ModelParams& params, const SpectrumSpec& spectrum, const SweepConfig& config) {
  params.validate();
  config.validate();
  for (double p : config.p_values) theoretical_rate(params, p);
  const auto grid = config.grid();
  const auto densities = sweep_densities(params, spectrum, grid, config);
  RateSweep out;
  std::vector<std::pair<double, std::size_t>> rows;
  for (const auto& d : densities) rows.emplace_back(d.lambda, d.n_lambda);
  out.weyl = weyl_from_counts(params, config, std::move(rows));
  out.passed = out.weyl.passed;
  for (double p : config.p_values) {
    out.rates.push_back(rate_from_densities(params, config, densities, p));
    out.passed = out.passed && out.rates.back().passed;
  }
  return out;
}

std::vector<EnvelopeStability> envelope_stability(const ModelParams& params, const SpectrumSpec& spectrum,
                                                  const SweepConfig& config, bool lower, double c_hat) {
  params.validate();
  config.validate();
  const auto base = config.grid();
  const auto grid = doubled_grid(base);
  CountOptions opts;
  opts.threads = config.threads;
  const auto reports = lower ? verify_lower_bounds(params, spectrum, grid, config.b_rule, c_hat, opts)
                             : verify_upper_bounds(params, spectrum, grid, config.b_rule, opts);
  std::vector<EnvelopeStability> out;
  for (RegionKind kind : {RegionKind::TailBeyond, RegionKind::DyadicShell}) {
    EnvelopeStability s;
    s.kind = kind;
    s.bc = lower ? Bc::Dirichlet : Bc::Neumann;
    bool first_base = true, first_ext = true;
    for (const auto& r : reports) {
      if (r.region.kind != kind) continue;
      s.rows.push_back(r);
      const bool in_base = r.lambda <= base.back() * (1.0 + 1e-12);
      auto pick = [&](double& acc, bool& first) {
        acc = first ? r.ratio : (lower ? std::min(acc, r.ratio) : std::max(acc, r.ratio));
        first = false;
      };
      if (in_base) pick(s.base, first_base);
      pick(s.extended, first_ext);
    }
    s.identically_zero = s.base == 0.0 && s.extended == 0.0;
    if (s.identically_zero) {
      s.relative_change = 0.0;
      s.stable = !lower;
    } else {
      s.relative_change = s.base > 0.0 ? std::abs(s.extended / s.base - 1.0) : std::numeric_limits<double>::infinity();
      s.stable = std::isfinite(s.extended) && s.relative_change <= config.stability_tol && (!lower || s.extended > 0.0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ChiSpec ChiSpec::ramp(double a, double b, ChiShape shape) {
  if (!(a > 0.0) || !(b > a)) throw std::domain_error("ramp cutoff needs 0 < a < b");
  ChiSpec c;
  c.mode = Mode::Ramp;
  c.a = a;
  c.b = b;
  c.shape = shape;
  return c;
}

ChiSpec ChiSpec::power(double p) {
  if (!(p >= 2.0)) throw std::domain_error("power cutoff needs p >= 2");
  ChiSpec c;
  c.mode = Mode::Power;
  c.power_p = p;
  return c;
}

double ChiSpec::operator()(double x) const {
  if (mode == Mode::Power) return std::min(std::pow(x, power_p / 2.0), 1.0);
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  const double t = (x - a) / (b - a);
  return shape == ChiShape::LinearRamp ? t : t * t * (3.0 - 2.0 * t);
}

namespace {

// Index of the last node at or below a (the ramp's Neumann cut).
std::size_t ramp_cut_index(const Mesh& mesh, double a) {
  std::size_t idx = mesh.size();
  for (std::size_t i = 0; i < mesh.size() && mesh.nodes[i] <= a * (1.0 + 1e-12); ++i) idx = i;
  if (idx == mesh.size()) throw std::domain_error("ramp start a lies below the first mesh node");
  if (mesh.size() - idx < 4) throw std::domain_error("ramp start a leaves fewer than 4 nodes");
  return idx;
}

// Neumann operator on the nodes from `cut` outward, on the same mesh.
SymTridiag neumann_tail(const SymTridiag& t, std::size_t cut) {
  SymTridiag out;
  out.diag.assign(t.diag.begin() + static_cast<std::ptrdiff_t>(cut), t.diag.end());
  out.offdiag.assign(t.offdiag.begin() + static_cast<std::ptrdiff_t>(cut), t.offdiag.end());
  out.offdiag.front() *= std::sqrt(2.0);
  return out;
}

}  // namespace

double localisation_mu_cutoff(const ModelParams& params, double lambda, const ChiSpec& chi) {
  const double shift = params.trace_shift_factor() * lambda;
  const Interval whole{0.0, params.x_max};
  double need = provable_mu_stop(params, whole, lambda);
  if (chi.mode == ChiSpec::Mode::Power) return std::max(need, provable_mu_stop(params, whole, shift));
  const RadialFamily family = whole_model_family(params, lambda);
  const std::size_t cut = ramp_cut_index(family.mesh(), chi.a);
  return std::max(need, provable_mu_stop(params, {family.mesh().nodes[cut], params.x_max}, shift));
}

LocalisationResult localisation_check(const ModelParams& params, const BoundarySpectrum& spectrum, double lambda,
                                      const ChiSpec& chi, const DensityOptions& options) {
  params.validate();
  const RadialFamily family = whole_model_family(params, lambda);
  const Mesh& mesh = family.mesh();
  const std::size_t m = mesh.size();
  const double shift = params.trace_shift_factor() * lambda;
  const RadialDensity density = assemble_density(params, family, spectrum, lambda, options);

  std::vector<double> chi_v(m);
  for (std::size_t i = 0; i < m; ++i) chi_v[i] = chi(mesh.nodes[i]);

  LocalisationResult res;
  res.lambda = lambda;
  res.n_lambda = density.n_lambda;
  const double n = static_cast<double>(density.n_lambda);
  for (std::size_t i = 0; i < m; ++i) res.lhs += n * mesh.weights[i] * chi_v[i] * chi_v[i] * density.values[i];
  // sum_k <v_k, E v_k> with E_{i,i+1} = (chi_i - chi_{i+1})^2 |T_{i,i+1}| / 2,
  // bounded via 2 v_i v_{i+1} <= v_i^2 + v_{i+1}^2.
  const auto& off = family.offdiag();
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double dchi = chi_v[i + 1] - chi_v[i];
    const double mass = mesh.weights[i] * density.values[i] + mesh.weights[i + 1] * density.values[i + 1];
    res.error_term += n * dchi * dchi * std::abs(off[i]) * 0.5 * mass;
  }

  Interval trace_iv{0.0, params.x_max};
  std::size_t cut = 0;
  if (chi.mode == ChiSpec::Mode::Ramp) {
    cut = ramp_cut_index(mesh, chi.a);
    trace_iv.a = mesh.nodes[cut];
  }
  const double limit = provable_mu_stop(params, trace_iv, shift);
  if (limit > spectrum.mu_cutoff()) {
    throw SpectrumIncompleteError(fmt::format("localisation trace at lambda = {:.6g} needs modes up to {:.6g}",
                                              lambda, limit));
  }
  const auto levels = spectrum.levels_below(limit);
  std::vector<double> partial(block_count(levels.size()), 0.0);
  for_each_block(levels.size(), options.threads, [&](std::size_t blk, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const SymTridiag t = family.matrix(levels[i].mu);
      double tr = 0.0;
      if (chi.mode == ChiSpec::Mode::Power) {
        tr = trace_plus_weighted(t, chi_v, shift);
      } else {
        const SymTridiag ta = neumann_tail(t, cut);
        const std::vector<double> ones(ta.size(), 1.0);
        tr = trace_plus_weighted(ta, ones, shift);
      }
      s += static_cast<double>(levels[i].multiplicity) * tr;
    }
    partial[blk] = s;
  });
  for (double s : partial) res.trace_term += s;
  res.rhs = (res.trace_term + res.error_term) / lambda;
  res.holds = res.lhs <= res.rhs * (1.0 + 1e-10) + 1e-12;
  return res;
}

double ims_relative_residual(const SymTridiag& t, std::span<const double> chi) {
  const std::size_t m = t.size();
  if (chi.size() != m) throw std::invalid_argument("ims_relative_residual: chi length must match the matrix");
  std::vector<double> a(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    a[i * m + i] = t.diag[i];
    if (i + 1 < m) a[i * m + i + 1] = a[(i + 1) * m + i] = t.offdiag[i];
  }
  auto left = [&](const std::vector<double>& x) {  // D X
    std::vector<double> y(x);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) y[i * m + j] *= chi[i];
    return y;
  };
  auto right = [&](const std::vector<double>& x) {  // X D
    std::vector<double> y(x);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) y[i * m + j] *= chi[j];
    return y;
  };
  const auto dtd = right(left(a));
  const auto d2t = left(left(a));
  const auto td2 = right(right(a));
  std::vector<double> comm(m * m);  // [D, T]
  const auto dt = left(a);
  const auto td = right(a);
  for (std::size_t k = 0; k < m * m; ++k) comm[k] = dt[k] - td[k];
  const auto dc = left(comm);
  const auto cd = right(comm);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < m * m; ++k) {
    const double lhs = dtd[k] - 0.5 * (d2t[k] + td2[k]);
    const double corr = -0.5 * (dc[k] - cd[k]);
    worst = std::max(worst, std::abs(lhs - corr));
    scale = std::max({scale, std::abs(dtd[k]), std::abs(d2t[k]), std::abs(td2[k])});
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace edgespec
