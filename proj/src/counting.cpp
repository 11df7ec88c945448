#include "edgespec/counting.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edgespec/errors.hpp"
#include "edgespec/parallel.hpp"

namespace edgespec {

namespace {

constexpr double kSafety = 1e-12;

double potential_floor(const ModelParams& params, Interval iv, double mu) {
  const double c = params.c_beta();
  const double beta = params.beta;
  if (mu <= 0.0) return c / (iv.b * iv.b);
  double x = c > 0.0 ? std::pow(2.0 * c / (beta * mu), 1.0 / (beta + 2.0)) : iv.a;
  x = std::clamp(x, iv.a, iv.b);
  if (x <= 0.0) return std::numeric_limits<double>::infinity();
  return c / (x * x) + mu * std::pow(x, beta);
}

double inner_scale(const Interval& iv) { return iv.a > 0.0 ? iv.a : iv.b; }

double mode_limit(const ModelParams& params, Interval iv, double threshold, SkipPolicy skip) {
  double limit = provable_mu_stop(params, iv, threshold);
  if (skip == SkipPolicy::Exhaustive) limit = std::max(limit, threshold / std::pow(inner_scale(iv), params.beta));
  return limit;
}

void check_cutoff(const BoundarySpectrum& spectrum, double needed) {
  if (needed > spectrum.mu_cutoff()) {
    throw SpectrumIncompleteError(fmt::format(
        "boundary spectrum is complete only below {:.6g}; this computation needs modes up to {:.6g}",
        spectrum.mu_cutoff(), needed));
  }
}

void check_upper_b(const ModelParams& params, double B, double lambda) {
  const double lo = 0.5 / std::sqrt(lambda);
  if (B < lo * (1.0 - kSafety) || B > 0.5 * params.eps * (1.0 + kSafety)) {
    throw std::domain_error(
        fmt::format("B = {:.6g} at lambda = {:.6g} is outside [{:.6g}, {:.6g}]", B, lambda, lo, 0.5 * params.eps));
  }
  if (2.0 * B > params.x_max) throw std::domain_error("the shell [B, 2B] leaves the model");
}

}  // namespace

Interval region_interval(const ModelParams& params, const Region& region) {
  switch (region.kind) {
    case RegionKind::TailBeyond:
      return {region.B, params.x_max};
    case RegionKind::DyadicShell:
      return {region.B, 2.0 * region.B};
    case RegionKind::Core:
      return {0.0, std::min(region.B, params.x_max)};
    case RegionKind::Whole:
      break;
  }
  return {0.0, params.x_max};
}

BoundaryCondition region_bc(const ModelParams& params, const Region& region) {
  switch (region.kind) {
    case RegionKind::TailBeyond:
      return {region.bc, params.outer_bc};
    case RegionKind::DyadicShell:
      return {region.bc, region.bc};
    case RegionKind::Core:
      return {Bc::Dirichlet, region.B >= params.x_max ? params.outer_bc : region.bc};
    case RegionKind::Whole:
      break;
  }
  return {Bc::Dirichlet, params.outer_bc};
}

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::TailBeyond:
      return "tail";
    case RegionKind::DyadicShell:
      return "shell";
    case RegionKind::Core:
      return "core";
    case RegionKind::Whole:
      break;
  }
  return "whole";
}

RegionKind parse_region_kind(const std::string& text) {
  if (text == "tail") return RegionKind::TailBeyond;
  if (text == "shell") return RegionKind::DyadicShell;
  if (text == "core") return RegionKind::Core;
  if (text == "whole") return RegionKind::Whole;
  throw std::invalid_argument("unknown region '" + text + "' (expected tail, shell, core or whole)");
}

double j_cutoff(const ModelParams& params, double B, double lambda) {
  if (!(B > 0.0) || !(lambda > 0.0)) throw std::domain_error("j_cutoff: B and lambda must be positive");
  return lambda / std::pow(std::min(B, params.x_max), params.beta);
}

double provable_mu_stop(const ModelParams& params, Interval interval, double threshold) {
  const double target = threshold * (1.0 + kSafety) + kSafety;
  if (potential_floor(params, interval, 0.0) >= target) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (potential_floor(params, interval, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw InfeasibleError("provable_mu_stop: no finite mode cutoff");
  }
  while (hi - lo > kSafety * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (potential_floor(params, interval, mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

double required_mu_cutoff(const ModelParams& params, const Region& region, double lambda,
                          const CountOptions& options) {
  return mode_limit(params, region_interval(params, region), options.threshold_factor * lambda, options.skip);
}

double envelope(const ModelParams& params, const Region& region, double lambda) {
  const double n = params.n;
  const double base = std::pow(lambda, (n + 1.0) / 2.0);
  switch (region.kind) {
    case RegionKind::TailBeyond:
      if (params.critical()) return base * (1.0 + std::abs(std::log(region.B)));
      return base * std::pow(region.B, 1.0 - params.beta_n() / 2.0);
    case RegionKind::DyadicShell:
      return base * std::pow(region.B, 1.0 - params.beta_n() / 2.0);
    case RegionKind::Core:
      return 0.0;
    case RegionKind::Whole:
      break;
  }
  if (params.critical()) return base * std::log(lambda);
  return std::pow(lambda, params.d() / 2.0);
}

CountReport region_count(const ModelParams& params, const BoundarySpectrum& spectrum, const Region& region,
                         double lambda, const CountOptions& options) {
  params.validate();
  if (!(lambda > 0.0)) throw std::domain_error("region_count: lambda must be positive");
  if (region.kind != RegionKind::Whole && !(region.B > 0.0)) throw std::domain_error("region_count: B must be positive");
  const Interval iv = region_interval(params, region);
  if (!(iv.b > iv.a)) throw std::domain_error("region_count: empty region");
  const double threshold = options.threshold_factor * lambda;
  const double limit = mode_limit(params, iv, threshold, options.skip);
  check_cutoff(spectrum, limit);

  CountReport rep;
  rep.lambda = lambda;
  rep.region = region;
  const auto levels = spectrum.levels_below(limit);
  if (!levels.empty()) {
    const RadialFamily family(params, iv, region_bc(params, region), mesh_nodes_for(params, iv, threshold));
    std::vector<std::size_t> partial(block_count(levels.size()), 0);
    for_each_block(levels.size(), options.threads, [&](std::size_t blk, std::size_t begin, std::size_t end) {
      std::size_t s = 0;
      for (std::size_t i = begin; i < end; ++i) s += levels[i].multiplicity * family.count(levels[i].mu, threshold);
      partial[blk] = s;
    });
    for (std::size_t s : partial) rep.count += s;
    for (const auto& lv : levels) rep.j_used += lv.multiplicity;
  }
  rep.bound_value = envelope(params, region, lambda);
  rep.ratio = rep.bound_value > 0.0 ? static_cast<double>(rep.count) / rep.bound_value : static_cast<double>(rep.count);
  return rep;
}

std::size_t total_count(const ModelParams& params, const BoundarySpectrum& spectrum, double lambda, int threads) {
  CountOptions opts;
  opts.threads = threads;
  return region_count(params, spectrum, Region{RegionKind::Whole, params.x_max, params.outer_bc}, lambda, opts).count;
}

double BRule::operator()(const ModelParams& params, double lambda) const {
  if (!(lambda > 0.0)) throw std::domain_error("B rule: lambda must be positive");
  switch (kind) {
    case BRuleKind::Bootstrap:
      return bootstrap_B(params, lambda);
    case BRuleKind::HalfPower:
      return 0.5 / std::sqrt(lambda);
    case BRuleKind::Scaled:
      return value / std::sqrt(lambda);
    case BRuleKind::Fixed:
      break;
  }
  return value;
}

std::string to_string(const BRule& rule) {
  switch (rule.kind) {
    case BRuleKind::Bootstrap:
      return "bootstrap";
    case BRuleKind::HalfPower:
      return "half_power";
    case BRuleKind::Scaled:
      return fmt::format("scaled:{}", rule.value);
    case BRuleKind::Fixed:
      break;
  }
  return fmt::format("fixed:{}", rule.value);
}

BRule parse_b_rule(const std::string& text) {
  if (text == "bootstrap") return {BRuleKind::Bootstrap, 0.0};
  if (text == "half_power") return {BRuleKind::HalfPower, 0.0};
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == tail.size() && used > 0 && v > 0.0) {
      if (head == "scaled") return {BRuleKind::Scaled, v};
      if (head == "fixed") return {BRuleKind::Fixed, v};
    }
  }
  throw std::invalid_argument("unknown B rule '" + text + "' (expected bootstrap, half_power, scaled:C or fixed:B)");
}

double bootstrap_gamma(const ModelParams& params) { return 1.0 / params.beta_n(); }

double bootstrap_B(const ModelParams& params, double lambda) {
  const double g = bootstrap_gamma(params);
  return std::pow(lambda, -0.5 + g) / (4.0 / g + 3.0);
}

namespace {

std::vector<CountReport> tail_and_shell(const ModelParams& params, const SpectrumSpec& spec,
                                        std::span<const double> grid, const std::vector<double>& bs, Bc bc,
                                        const CountOptions& options) {
  double cutoff = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (RegionKind k : {RegionKind::TailBeyond, RegionKind::DyadicShell}) {
      cutoff = std::max(cutoff, required_mu_cutoff(params, Region{k, bs[i], bc}, grid[i], options));
    }
  }
  const BoundarySpectrum spectrum = spec.build(std::max(cutoff, 1.0) * (1.0 + 1e-9));
  std::vector<CountReport> out;
  out.reserve(2 * grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (RegionKind k : {RegionKind::TailBeyond, RegionKind::DyadicShell}) {
      out.push_back(region_count(params, spectrum, Region{k, bs[i], bc}, grid[i], options));
    }
  }
  return out;
}

}  // namespace

std::vector<CountReport> verify_upper_bounds(const ModelParams& params, const SpectrumSpec& spectrum,
                                             std::span<const double> lambda_grid, const BRule& rule,
                                             const CountOptions& options) {
  std::vector<double> bs;
  for (double lambda : lambda_grid) {
    bs.push_back(rule(params, lambda));
    check_upper_b(params, bs.back(), lambda);
  }
  return tail_and_shell(params, spectrum, lambda_grid, bs, Bc::Neumann, options);
}

std::vector<CountReport> verify_lower_bounds(const ModelParams& params, const SpectrumSpec& spectrum,
                                             std::span<const double> lambda_grid, const BRule& rule, double c_hat,
                                             const CountOptions& options) {
  std::vector<double> bs;
  for (double lambda : lambda_grid) {
    const double B = rule(params, lambda);
    if (B < c_hat / std::sqrt(lambda) * (1.0 - kSafety)) {
      throw std::domain_error(fmt::format("B = {:.6g} is below c_hat lambda^(-1/2) at lambda = {:.6g}", B, lambda));
    }
    if (params.c_beta() / (B * B) > 0.5 * lambda * (1.0 + kSafety)) {
      throw std::domain_error(fmt::format("C_beta / B^2 exceeds lambda / 2 at lambda = {:.6g}", lambda));
    }
    if (2.0 * B > params.x_max) throw std::domain_error("the shell [B, 2B] leaves the model");
    bs.push_back(B);
  }
  return tail_and_shell(params, spectrum, lambda_grid, bs, Bc::Dirichlet, options);
}

std::vector<ModelEigenvalue> model_eigenvalues(const ModelParams& params, const BoundarySpectrum& spectrum,
                                               double lambda, int threads, std::size_t budget) {
  params.validate();
  const Interval iv{0.0, params.x_max};
  const double limit = provable_mu_stop(params, iv, lambda);
  check_cutoff(spectrum, limit);
  const auto levels = spectrum.levels_below(limit);
  if (levels.empty()) return {};
  const RadialFamily family(params, iv, {Bc::Dirichlet, params.outer_bc}, mesh_nodes_for(params, iv, lambda));
  std::size_t total = 0;
  for (const auto& lv : levels) total += family.count(lv.mu, lambda);
  if (total > budget) throw InfeasibleError(fmt::format("{} model eigenvalues below {} exceed the budget", total, lambda));
  std::vector<std::vector<ModelEigenvalue>> partial(block_count(levels.size()));
  for_each_block(levels.size(), threads, [&](std::size_t blk, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto eigs = eigenvalues_below(family.matrix(levels[i].mu), lambda);
      for (std::size_t k = 0; k < eigs.size(); ++k) {
        partial[blk].push_back({levels[i].mu, levels[i].multiplicity, k, eigs[k]});
      }
    }
  });
  std::vector<ModelEigenvalue> out;
  out.reserve(total);
  for (auto& p : partial) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace edgespec
