#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "edgespec/counting.hpp"
#include "edgespec/density.hpp"
#include "edgespec/errors.hpp"

using namespace edgespec;

namespace {

ModelParams model(double beta) {
  ModelParams p;
  p.beta = beta;
  return p;
}

BoundarySpectrum whole_spectrum(const ModelParams& p, double lambda) {
  return synthetic_weyl_spectrum(p.n, std::max(1.0, provable_mu_stop(p, {0.0, p.x_max}, lambda)) * 1.000001);
}

RadialDensity density_at(const ModelParams& p, double lambda) {
  return assemble_density(p, whole_spectrum(p, lambda), lambda);
}

// Unit mass on the node x0 of a three-node grid.
RadialDensity point_mass(double x0) {
  RadialDensity d;
  d.grid.nodes = {x0 / 2, x0, (1.0 + x0) / 2};
  d.grid.weights = {1.0, 1.0, 1.0};
  d.values = {0.0, 1.0, 0.0};
  d.n_lambda = 1;
  return d;
}

}  // namespace

TEST_SUITE("density") {
  TEST_CASE("point-mass moments") {
    const auto d = point_mass(0.5);
    CHECK(moment_p(d, 2.0) == doctest::Approx(0.25));
    CHECK(wasserstein_to_boundary(d, 2.0) == doctest::Approx(0.5));
    CHECK(wasserstein_to_boundary(d, 1.0) == moment_p(d, 1.0));
    CHECK_THROWS(moment_p(d, 0.5));
  }

  TEST_CASE("normalization, positivity and moment properties") {
    for (double beta : {2.0, 4.0}) {
      const ModelParams p = model(beta);
      for (double lam : {150.0, 600.0}) {
        const auto d = density_at(p, lam);
        CHECK(d.n_lambda == total_count(p, whole_spectrum(p, lam), lam));
        double mass = 0.0;
        for (std::size_t i = 0; i < d.values.size(); ++i) {
          CHECK(d.values[i] >= 0.0);
          mass += d.grid.weights[i] * d.values[i];
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(tail_mass(d, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(tail_mass(d, p.x_max) <= d.grid.h * *std::max_element(d.values.begin(), d.values.end()));

        double prev_m = 2.0;
        double prev_w = 0.0;
        for (double q : {1.0, 2.0, 3.0, 5.0, 8.0}) {
          const double m = moment_p(d, q);
          const double w = wasserstein_to_boundary(d, q);
          CHECK(m <= prev_m);
          CHECK(w >= 0.0);
          CHECK(w <= 1.0);
          CHECK(w >= prev_w * (1.0 - 1e-12));
          prev_m = m;
          prev_w = w;
        }
        CHECK(wasserstein_to_boundary(d, 1.0) == moment_p(d, 1.0));

        double prev_t = 2.0;
        for (double a = 0.0; a <= 1.0; a += 0.01) {
          const double t = tail_mass(d, a);
          double below = 0.0;
          for (std::size_t i = 0; i < d.values.size(); ++i) {
            if (d.grid.nodes[i] < a) below += d.grid.weights[i] * d.values[i];
          }
          CHECK(t + below == doctest::Approx(1.0).epsilon(1e-8));
          CHECK(t <= prev_t);
          if (a > 0.0) CHECK(moment_p(d, 1.0) <= t + a + 1e-12);
          prev_t = t;
        }
      }
    }
  }

  TEST_CASE("moment recomputed from the csv columns") {
    const ModelParams p = model(4.0);
    const auto d = density_at(p, 400.0);
    double s = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) s += d.grid.weights[i] * d.grid.nodes[i] * d.grid.nodes[i] * d.values[i];
    CHECK(moment_p(d, 2.0) == doctest::Approx(s).epsilon(1e-13));
  }

  TEST_CASE("tail sequence") {
    const ModelParams p = model(4.0);
    const auto d = density_at(p, 500.0);
    const double B = bootstrap_B(p, 500.0);
    const auto seq = tail_sequence(d, B, bootstrap_k_max(p));
    CHECK(seq.size() == 19);
    for (std::size_t k = 1; k < seq.size(); ++k) CHECK(seq[k] <= seq[k - 1]);
    const auto far = tail_sequence(d, 0.6, 3);
    CHECK(far[1] == 0.0);
    CHECK(far[2] == 0.0);
    CHECK_THROWS(tail_sequence(d, 0.0, 3));
    const auto rep = moment_report(p, d, 2.0);
    CHECK(rep.tail_masses.size() == seq.size());
    CHECK(rep.tail_masses.front().first == 1);
    CHECK(rep.moment == moment_p(d, 2.0));
  }

  TEST_CASE("single eigenfunction just above the ground state") {
    ModelParams p = model(2.0);
    p.mesh_nodes = 300;
    const RadialFamily family = whole_model_family(p, 50.0);
    const auto sys = dense_oracle_eigensystem(family.matrix(1.0));
    const double lambda = sys.values[0] * (1.0 + 1e-6);
    const auto spec = whole_spectrum(p, lambda);
    const auto d = assemble_density(p, family, spec, lambda);
    REQUIRE(d.n_lambda == 1);
    const auto u = nodal_values(family.mesh(), sys.vectors[0]);
    double peak = 0.0;
    for (double v : u) peak = std::max(peak, v * v);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(d.values[i] - u[i] * u[i]) <= 1e-8 * peak);
    // Unimodal.
    const auto top = std::max_element(d.values.begin(), d.values.end()) - d.values.begin();
    for (std::ptrdiff_t i = 0; i + 1 <= top; ++i) CHECK(d.values[i] <= d.values[i + 1] * (1.0 + 1e-9));
    for (std::size_t i = static_cast<std::size_t>(top); i + 1 < d.values.size(); ++i) CHECK(d.values[i + 1] <= d.values[i] * (1.0 + 1e-9));
  }

  TEST_CASE("errors") {
    const ModelParams p = model(2.0);
    CHECK_THROWS_AS(density_at(p, 5.0), EmptySpectrumError);
    DensityOptions o;
    o.budget = 3;
    CHECK_THROWS_AS(assemble_density(p, whole_spectrum(p, 500.0), 500.0, o), InfeasibleError);
  }

  TEST_CASE("thread count does not change the density") {
    const ModelParams p = model(4.0);
    const auto spec = whole_spectrum(p, 800.0);
    DensityOptions one, many;
    many.threads = 4;
    const auto a = assemble_density(p, spec, 800.0, one);
    const auto b = assemble_density(p, spec, 800.0, many);
    CHECK(a.values == b.values);
  }
}
