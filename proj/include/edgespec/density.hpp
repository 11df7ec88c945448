#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "edgespec/boundary_spectrum.hpp"
#include "edgespec/model_params.hpp"
#include "edgespec/radial_solver.hpp"

namespace edgespec {

// Radial marginal f of the averaged density of all eigenfunctions below
// lambda, against dx, on the whole-model mesh. All modes share this mesh, so
// no resampling is involved. Integrals use the mesh quadrature weights:
// sum_i weights[i] * values[i] == 1.
struct RadialDensity {
  Mesh grid;
  std::vector<double> values;
  std::size_t n_lambda = 0;
  double lambda = 0.0;
};

inline constexpr std::size_t kDefaultEigenpairBudget = 5'000'000;

struct DensityOptions {
  int threads = 1;
  std::uint64_t seed = kDefaultSeed;
  std::size_t budget = kDefaultEigenpairBudget;
};

// The operator the density is built from: the whole model, Dirichlet
// cutoff at 0 and outer_bc at x_max, meshed for eigenvalues below lambda.
RadialFamily whole_model_family(const ModelParams& params, double lambda);

// Throws EmptySpectrumError if N(lambda) = 0 and InfeasibleError if
// N(lambda) exceeds options.budget.
RadialDensity assemble_density(const ModelParams& params, const BoundarySpectrum& spectrum, double lambda,
                               const DensityOptions& options = {});
// As above on a prebuilt whole-model family (see whole_model_family).
RadialDensity assemble_density(const ModelParams& params, const RadialFamily& family,
                               const BoundarySpectrum& spectrum, double lambda, const DensityOptions& options = {});

// sum_i min(x_i^p, 1) f_i w_i. Requires p >= 1.
double moment_p(const RadialDensity& density, double p);
// moment_p^{1/p}, which is W_p(mu_lambda, delta_0).
double wasserstein_to_boundary(const RadialDensity& density, double p);
// Mass on x >= a.
double tail_mass(const RadialDensity& density, double a);
// (F_1, ..., F_{k_max}) with F_k = tail_mass(k B).
std::vector<double> tail_sequence(const RadialDensity& density, double B, int k_max);

// floor(4/gamma + 3) with gamma = 1/(n beta): the number of shells the
// bootstrap walks through.
int bootstrap_k_max(const ModelParams& params);

struct MomentReport {
  double lambda = 0.0;
  double p = 1.0;
  double moment = 0.0;
  double wasserstein = 0.0;
  std::vector<std::pair<int, double>> tail_masses;  // (k, F_k)
};

// Moment, distance and the bootstrap tail sequence at B = bootstrap_B.
MomentReport moment_report(const ModelParams& params, const RadialDensity& density, double p);

}  // namespace edgespec
