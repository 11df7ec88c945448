#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "edgespec/analysis.hpp"
#include "edgespec/boundary_spectrum.hpp"
#include "edgespec/model_params.hpp"
#include "edgespec/radial_solver.hpp"

namespace edgespec {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Uniform on [-1, 1) from 53 bits, portable across standard libraries.
double uniform_pm1(std::mt19937_64& rng);
// Symmetric tridiagonal with diagonal in [-5, 5] and off-diagonal in [-2, 2].
SymTridiag random_tridiag(std::mt19937_64& rng, std::size_t m);

// Sturm counts against the dense oracle on random matrices of size <= max_m,
// at thresholds spread over each spectrum.
CheckResult check_oracle_equivalence(std::uint64_t seed, int instances = 100, int thresholds = 10,
                                     std::size_t max_m = 200);
// sturm_count(P_mu on [a,b], lambda) == sturm_count(P_1 on the mapped mesh, lambda / s^2).
CheckResult check_scaling_identity(const ModelParams& params, std::uint64_t seed, int triples = 50);
CheckResult check_ims_identity(std::uint64_t seed, int cases = 100, double tol = 1e-12);
// Core(lambda^{-1/2}/2) has no eigenvalue below 3 lambda, with every mode
// below 3 lambda / B^beta counted explicitly.
CheckResult check_core_zero_count(const ModelParams& params, const SpectrumSpec& spectrum,
                                  const std::vector<double>& grid, int threads);
// Ramp (A/2, A) and power p in {2, 3} localisation inequalities.
CheckResult check_localisation(const ModelParams& params, const SpectrumSpec& spectrum,
                               const std::vector<double>& grid, int threads, std::uint64_t seed);
// Modes at or beyond provable_mu_stop have zero count on random intervals.
CheckResult check_skip_soundness(const ModelParams& params, std::uint64_t seed, int samples = 50);
// Dirichlet count <= Neumann count on the same mesh.
CheckResult check_bracketing(const ModelParams& params, std::uint64_t seed, int samples = 50);

std::vector<CheckResult> run_verify_suite(const ModelParams& params, const SpectrumSpec& spectrum,
                                          const SweepConfig& sweep);

}  // namespace edgespec
