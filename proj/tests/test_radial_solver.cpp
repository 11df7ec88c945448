#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "edgespec/counting.hpp"
#include "edgespec/radial_solver.hpp"
#include "edgespec/verification.hpp"
#include "oracles.hpp"

using namespace edgespec;

namespace {

SymTridiag two_by_two() { return SymTridiag{{2.0, 2.0}, {-1.0}}; }

ModelParams model(double beta) {
  ModelParams p;
  p.beta = beta;
  return p;
}

const BoundaryCondition kDD{Bc::Dirichlet, Bc::Dirichlet};
const BoundaryCondition kNN{Bc::Neumann, Bc::Neumann};

std::vector<double> free_dirichlet_eigs(int m, double lambda) {
  const auto op = assemble_radial(RadialPotential{0.0, 0.0, 2.0}, Interval{0.0, std::numbers::pi}, kDD, m);
  return eigenvalues_below(op.matrix, lambda);
}

}  // namespace

TEST_SUITE("radial_solver") {
  TEST_CASE("sturm_count examples") {
    CHECK(sturm_count(SymTridiag{{1.0, 2.0, 3.0}, {0.0, 0.0}}, 2.5) == 2);
    CHECK(sturm_count(two_by_two(), 2.0) == 1);
    // An eigenvalue equal to lambda is not below it.
    CHECK(sturm_count(two_by_two(), 1.0) == 0);
    CHECK(sturm_count(two_by_two(), 3.0) == 1);
  }

  TEST_CASE("eigenvalues_below examples") {
    const auto e = eigenvalues_below(two_by_two(), 10.0);
    REQUIRE(e.size() == 2);
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e[1] == doctest::Approx(3.0).epsilon(1e-12));
    std::mt19937_64 rng(7);
    const auto t = random_tridiag(rng, 30);
    CHECK(eigenvalues_below(t, t.gershgorin_lower() - 1e-9).empty());
    CHECK_THROWS(eigenvalues_below(t, 1e9, 3));
  }

  TEST_CASE("eigenvector examples") {
    const auto v1 = eigenvector(two_by_two(), 1.0);
    CHECK(std::abs(v1[0]) == doctest::Approx(std::sqrt(0.5)));
    CHECK(v1[0] * v1[1] > 0.0);
    const auto v3 = eigenvector(two_by_two(), 3.0);
    CHECK(std::abs(v3[0]) == doctest::Approx(std::sqrt(0.5)));
    CHECK(v3[0] * v3[1] < 0.0);
  }

  TEST_CASE("dense oracle examples") {
    const auto d = dense_oracle_eigs(SymTridiag{{3.0, 1.0, 2.0}, {0.0, 0.0}});
    REQUIRE(d.size() == 3);
    CHECK(d[0] == doctest::Approx(1.0));
    CHECK(d[1] == doctest::Approx(2.0));
    CHECK(d[2] == doctest::Approx(3.0));
    const auto e = dense_oracle_eigs(two_by_two());
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK(e[1] == doctest::Approx(3.0));
    CHECK_THROWS(dense_oracle_eigs(SymTridiag{std::vector<double>(401, 0.0), std::vector<double>(400, 0.0)}));
  }

  TEST_CASE("mesh layout") {
    const Mesh m = uniform_mesh(Interval{0.0, 1.0}, kDD, 9);
    REQUIRE(m.size() == 9);
    CHECK(m.h == doctest::Approx(0.1));
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.nodes[i] == doctest::Approx((i + 1) * m.h));
    const Mesh n = uniform_mesh(Interval{0.5, 1.0}, kNN, 9);
    CHECK(n.size() == 11);
    CHECK(n.nodes.front() == 0.5);
    CHECK(n.nodes.back() == 1.0);
    CHECK(n.weights.front() == doctest::Approx(n.h / 2));
  }

  TEST_CASE("assembled entries") {
    const int m = 20;
    const auto op = assemble_radial(model(2.0), 0.0, Interval{0.0, 1.0}, kDD, m);
    const double h = 1.0 / (m + 1);
    for (int i = 0; i < m; ++i) {
      const double x = (i + 1) * h;
      CHECK(op.matrix.diag[i] == doctest::Approx(2.0 / (h * h) + 0.75 / (x * x)).epsilon(1e-14));
    }
    for (double o : op.matrix.offdiag) CHECK(o == doctest::Approx(-1.0 / (h * h)));
    ModelParams wide = model(2.0);
    wide.x_max = 2.0;
    const auto op16 = assemble_radial(wide, 16.0, Interval{1.0, 2.0}, kDD, m);
    for (int i = 0; i < m; ++i) {
      const double x = 1.0 + (i + 1) * h;
      CHECK(op16.matrix.diag[i] == doctest::Approx(2.0 / (h * h) + 0.75 / (x * x) + 16.0 * x * x).epsilon(1e-14));
    }
    CHECK_THROWS(assemble_radial(model(2.0), -1.0, Interval{0.0, 1.0}, kDD, m));
    CHECK_THROWS(assemble_radial(model(2.0), 0.0, Interval{1.0, 1.0}, kDD, m));
  }

  TEST_CASE("free Dirichlet Laplacian matches the discrete closed form") {
    const int m = 400;
    const auto exact = oracle::discrete_dirichlet_laplacian(m, std::numbers::pi);
    const auto got = free_dirichlet_eigs(m, 10.0);
    REQUIRE(got.size() == 3);
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - exact[k]) <= 1e-10);
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx((k + 1.0) * (k + 1.0)).epsilon(1e-3));
  }

  TEST_CASE("h-halving converges at second order") {
    std::vector<double> err;
    for (int cells : {50, 100, 200, 400}) {
      const auto e = free_dirichlet_eigs(cells - 1, 10.0);
      err.push_back(std::abs(e[2] - 9.0));
    }
    for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) == doctest::Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("Neumann ends are second order") {
    // -u'' on [0, pi] with Neumann at both ends: k^2, k = 0, 1, 2, ...
    std::vector<double> err;
    for (int cells : {50, 100, 200, 400}) {
      const auto op = assemble_radial(RadialPotential{0.0, 0.0, 2.0}, Interval{0.0 + 1.0, std::numbers::pi + 1.0}, kNN,
                                      cells - 1);
      const auto e = eigenvalues_below(op.matrix, 10.0);
      REQUIRE(e.size() == 4);
      CHECK(std::abs(e[0]) < 1e-9);
      err.push_back(std::abs(e[3] - 9.0));
    }
    for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) == doctest::Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("singular ground state approaches the Bessel zero") {
    // beta = 2, n = 1: -u'' + (3/4)/x^2 u on (0, 1), Dirichlet at 1, eigenvalues j_{1,k}^2.
    const auto op = assemble_radial(model(2.0), 0.0, Interval{0.0, 1.0}, kDD, 2000);
    const auto e = eigenvalues_below(op.matrix, 60.0);
    REQUIRE(e.size() >= 2);
    const double j1 = oracle::bessel_zero(1.0, 1);
    const double j2 = oracle::bessel_zero(1.0, 2);
    CHECK(e[0] == doctest::Approx(j1 * j1).epsilon(1e-4));
    CHECK(e[1] == doctest::Approx(j2 * j2).epsilon(1e-4));
  }

  TEST_CASE("harmonic confinement matches the radial oscillator") {
    const double mu = 1e4;
    const auto op = assemble_radial(model(2.0), mu, Interval{0.0, 1.0}, kDD, 4000);
    const auto e = eigenvalues_below(op.matrix, 1300.0);
    REQUIRE(e.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(e[k] == doctest::Approx(oracle::radial_oscillator(mu, 1.0, k)).epsilon(1e-4));
  }

  TEST_CASE("sturm counts agree with an independent QL solver") {
    std::mt19937_64 rng(11);
    for (int inst = 0; inst < 40; ++inst) {
      const auto t = random_tridiag(rng, 50);
      const auto ref = oracle::ql_eigenvalues(t);
      for (int q = 0; q < 10; ++q) {
        const double lam = t.gershgorin_lower() + (t.gershgorin_upper() - t.gershgorin_lower()) * (q + 0.5) / 10.0;
        CHECK(sturm_count(t, lam) == oracle::count_below(ref, lam));
      }
      const auto below = eigenvalues_below(t, 0.5 * (ref[29] + ref[30]));
      REQUIRE(below.size() == 30);
      for (std::size_t k = 0; k < below.size(); ++k) CHECK(below[k] == doctest::Approx(ref[k]).epsilon(1e-10).scale(10));
    }
  }

  TEST_CASE("eigenpairs are orthonormal with small residual") {
    std::mt19937_64 rng(3);
    const auto t = random_tridiag(rng, 120);
    const auto ep = eigenpairs_below(t, 0.0);
    for (std::size_t k = 0; k < ep.values.size(); ++k) {
      const auto& v = ep.vectors[k];
      double res = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        double tv = t.diag[i] * v[i];
        if (i > 0) tv += t.offdiag[i - 1] * v[i - 1];
        if (i + 1 < v.size()) tv += t.offdiag[i] * v[i + 1];
        res = std::max(res, std::abs(tv - ep.values[k] * v[i]));
      }
      CHECK(res <= 1e-8 * t.norm());
      for (std::size_t l = 0; l <= k; ++l) {
        double dot = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * ep.vectors[l][i];
        CHECK(dot == doctest::Approx(l == k ? 1.0 : 0.0).scale(1.0).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("nodal values carry the quadrature normalization") {
    const auto op = assemble_radial(model(4.0), 5.0, Interval{0.2, 1.0}, kNN, 80);
    const auto ep = eigenpairs_below(op.matrix, 200.0);
    REQUIRE(!ep.values.empty());
    for (const auto& v : ep.vectors) {
      const auto u = nodal_values(op.mesh, v);
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) s += op.mesh.weights[i] * u[i] * u[i];
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("count monotonicity") {
    const ModelParams p = model(4.0);
    const Interval iv{0.1, 1.0};
    const auto dd = RadialFamily(p, iv, kDD, 150);
    const auto nn = RadialFamily(p, iv, kNN, 150);
    for (double mu : {0.0, 3.0, 30.0, 300.0}) {
      std::size_t prev = 0;
      for (double lam = 1.0; lam < 5000.0; lam *= 1.4) {
        const std::size_t c = nn.count(mu, lam);
        CHECK(c >= prev);
        CHECK(c >= dd.count(mu, lam));
        CHECK(c <= nn.count(mu * 0.5, lam));
        prev = c;
      }
    }
  }

  TEST_CASE("Neumann count obeys the free-Laplacian bound") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 30; ++s) {
      const double a = 0.05 + 0.5 * u(rng);
      const double b = a + 0.1 + (1.0 - a - 0.1) * u(rng);
      const double lam = 50.0 + 5000.0 * u(rng);
      const ModelParams p = model(2.0 + 4.0 * u(rng));
      const auto op = assemble_radial(p, 20.0 * u(rng), Interval{a, b}, kNN, mesh_nodes_for(p, Interval{a, b}, lam));
      CHECK(static_cast<double>(sturm_count(op.matrix, lam)) <= 2.0 + (b - a) * std::sqrt(lam) / std::numbers::pi);
    }
  }

  TEST_CASE("rescaled_problem examples") {
    const auto r = rescaled_problem(model(2.0), 16.0, Interval{1.0, 2.0});
    CHECK(r.interval.a == doctest::Approx(2.0));
    CHECK(r.interval.b == doctest::Approx(4.0));
    CHECK(r.lambda_scale == doctest::Approx(4.0));
    const auto id = rescaled_problem(model(3.0), 1.0, Interval{0.3, 0.9});
    CHECK(id.interval.a == doctest::Approx(0.3));
    CHECK(id.interval.b == doctest::Approx(0.9));
    CHECK(id.lambda_scale == doctest::Approx(1.0));
  }

  TEST_CASE("scaling identity on mapped meshes") {
    const auto r = check_scaling_identity(model(4.0), 99, 20);
    CHECK_MESSAGE(r.passed, r.detail);
  }

  TEST_CASE("trace_plus_weighted examples") {
    std::mt19937_64 rng(1);
    const auto t = random_tridiag(rng, 10);
    CHECK(trace_plus_weighted(t, std::vector<double>(10, 0.0), 3.0) == 0.0);
    CHECK(trace_plus_weighted(t, std::vector<double>(10, 1.0), t.gershgorin_lower() - 1.0) == 0.0);
    const SymTridiag d{{1.0, 3.0}, {0.0}};
    CHECK(trace_plus_weighted(d, std::vector<double>{1.0, 1.0}, 2.0) == doctest::Approx(1.0));
  }

  TEST_CASE("trace_plus_weighted against the dense spectrum") {
    std::mt19937_64 rng(21);
    for (int s = 0; s < 10; ++s) {
      const auto t = random_tridiag(rng, 40);
      std::vector<double> chi(40);
      for (auto& c : chi) c = 0.5 * (1.0 + uniform_pm1(rng));
      const double shift = uniform_pm1(rng) * 3.0;
      SymTridiag w;
      w.diag.resize(40);
      w.offdiag.resize(39);
      for (std::size_t i = 0; i < 40; ++i) w.diag[i] = chi[i] * chi[i] * (shift - t.diag[i]);
      for (std::size_t i = 0; i < 39; ++i) w.offdiag[i] = -chi[i] * chi[i + 1] * t.offdiag[i];
      double ref = 0.0;
      for (double e : oracle::ql_eigenvalues(w)) ref += std::max(e, 0.0);
      CHECK(trace_plus_weighted(t, chi, shift) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
    }
  }
}
