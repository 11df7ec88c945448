#include "edgespec/density.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edgespec/counting.hpp"
#include "edgespec/errors.hpp"
#include "edgespec/parallel.hpp"

namespace edgespec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_p(double p) {
  if (!(p >= 1.0)) throw std::domain_error(fmt::format("moment order p = {} must be >= 1", p));
}

}  // namespace

RadialFamily whole_model_family(const ModelParams& params, double lambda) {
  const Interval iv{0.0, params.x_max};
  return RadialFamily(params, iv, {Bc::Dirichlet, params.outer_bc}, mesh_nodes_for(params, iv, lambda));
}

RadialDensity assemble_density(const ModelParams& params, const BoundarySpectrum& spectrum, double lambda,
                               const DensityOptions& options) {
  params.validate();
  return assemble_density(params, whole_model_family(params, lambda), spectrum, lambda, options);
}

RadialDensity assemble_density(const ModelParams& params, const RadialFamily& family,
                               const BoundarySpectrum& spectrum, double lambda, const DensityOptions& options) {
  const Mesh& mesh = family.mesh();
  const std::size_t m = mesh.size();
  const double limit = provable_mu_stop(params, family.interval(), lambda);
  if (limit > spectrum.mu_cutoff()) {
    throw SpectrumIncompleteError(fmt::format("density at lambda = {:.6g} needs boundary modes up to {:.6g}, have {:.6g}",
                                              lambda, limit, spectrum.mu_cutoff()));
  }
  // Counts are nonincreasing in mu, so the scan stops at the first empty mode.
  std::vector<BoundarySpectrum::Level> levels;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  for (const auto& lv : spectrum.levels_below(limit)) {
    const std::size_t c = family.count(lv.mu, lambda);
    if (c == 0) break;
    levels.push_back(lv);
    counts.push_back(c);
    total += c * lv.multiplicity;
  }
  if (total == 0) {
    throw EmptySpectrumError(fmt::format("no eigenvalue below lambda = {:.6g}; the density is undefined", lambda));
  }
  if (total > options.budget) {
    throw InfeasibleError(
        fmt::format("N(lambda) = {} at lambda = {:.6g} exceeds the eigenpair budget {}", total, lambda, options.budget));
  }

  std::vector<std::vector<double>> partial(block_count(levels.size()));
  for_each_block(levels.size(), options.threads, [&](std::size_t blk, std::size_t begin, std::size_t end) {
    std::vector<double> acc(m, 0.0);
    for (std::size_t i = begin; i < end; ++i) {
      const auto pairs =
          eigenpairs_below(family.matrix(levels[i].mu), lambda, splitmix64(options.seed ^ splitmix64(i)));
      if (pairs.values.size() != counts[i]) throw ConvergenceError("density: eigenpair count disagrees with Sturm count");
      const double mult = static_cast<double>(levels[i].multiplicity);
      for (const auto& v : pairs.vectors) {
        for (std::size_t r = 0; r < m; ++r) acc[r] += mult * v[r] * v[r];
      }
    }
    partial[blk] = std::move(acc);
  });

  RadialDensity out;
  out.grid = mesh;
  out.n_lambda = total;
  out.lambda = lambda;
  out.values.assign(m, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t r = 0; r < m; ++r) out.values[r] += acc[r];
  }
  const double inv_n = 1.0 / static_cast<double>(total);
  for (std::size_t r = 0; r < m; ++r) out.values[r] *= inv_n / mesh.weights[r];
  return out;
}

double moment_p(const RadialDensity& density, double p) {
  require_p(p);
  double s = 0.0;
  for (std::size_t i = 0; i < density.values.size(); ++i) {
    const double x = density.grid.nodes[i];
    s += std::min(std::pow(x, p), 1.0) * density.values[i] * density.grid.weights[i];
  }
  return s;
}

double wasserstein_to_boundary(const RadialDensity& density, double p) {
  const double m = moment_p(density, p);
  return p == 1.0 ? m : std::pow(m, 1.0 / p);
}

double tail_mass(const RadialDensity& density, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < density.values.size(); ++i) {
    if (density.grid.nodes[i] >= a) s += density.values[i] * density.grid.weights[i];
  }
  return s;
}

std::vector<double> tail_sequence(const RadialDensity& density, double B, int k_max) {
  if (!(B > 0.0) || k_max < 1) throw std::domain_error("tail_sequence: need B > 0 and k_max >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) out.push_back(tail_mass(density, k * B));
  return out;
}

int bootstrap_k_max(const ModelParams& params) {
  return static_cast<int>(std::floor(4.0 / bootstrap_gamma(params) + 3.0 + 1e-9));
}

MomentReport moment_report(const ModelParams& params, const RadialDensity& density, double p) {
  MomentReport r;
  r.lambda = density.lambda;
  r.p = p;
  r.moment = moment_p(density, p);
  r.wasserstein = wasserstein_to_boundary(density, p);
  const auto tails = tail_sequence(density, bootstrap_B(params, density.lambda), bootstrap_k_max(params));
  for (std::size_t k = 0; k < tails.size(); ++k) r.tail_masses.emplace_back(static_cast<int>(k + 1), tails[k]);
  return r;
}

}  // namespace edgespec
