#pragma once

// Reference values computed independently of the library: closed forms,
// brute-force enumeration and a separate tridiagonal eigensolver.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "edgespec/radial_solver.hpp"

namespace oracle {

// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
inline std::vector<double> ql_eigenvalues(const edgespec::SymTridiag& t) {
  const std::size_t n = t.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = t.offdiag[i];
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw std::runtime_error("ql_eigenvalues: no convergence");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool early = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            early = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (early) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

inline std::size_t count_below(const std::vector<double>& eigs, double lambda) {
  return static_cast<std::size_t>(std::count_if(eigs.begin(), eigs.end(), [&](double a) { return a < lambda; }));
}

// sum_i (k_i / r_i)^2 < cutoff by scanning a box of integer vectors.
inline std::vector<double> torus_by_box(const std::vector<double>& radii, double cutoff) {
  std::vector<double> out;
  const std::size_t n = radii.size();
  std::vector<long long> lim(n);
  for (std::size_t i = 0; i < n; ++i) lim[i] = static_cast<long long>(std::ceil(radii[i] * std::sqrt(cutoff))) + 1;
  std::vector<long long> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = -lim[i];
  while (true) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (k[i] / radii[i]) * (k[i] / radii[i]);
    if (v < cutoff) out.push_back(v);
    std::size_t i = 0;
    while (i < n && ++k[i] > lim[i]) {
      k[i] = -lim[i];
      ++i;
    }
    if (i == n) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// k-th positive zero (k >= 1) of the Bessel function J_nu, nu >= 0.
inline double bessel_zero(double nu, int k) {
  const double step = 0.05;
  double x = step;
  double fx = std::cyl_bessel_j(nu, x);
  int found = 0;
  while (true) {
    const double y = x + step;
    const double fy = std::cyl_bessel_j(nu, y);
    if ((fx < 0.0) != (fy < 0.0)) {
      if (++found == k) {
        double lo = x, hi = y;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((std::cyl_bessel_j(nu, mid) < 0.0) == (std::cyl_bessel_j(nu, lo) < 0.0) ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
    }
    x = y;
    fx = fy;
  }
}

// Eigenvalues of the second-difference Dirichlet matrix with m interior nodes
// on an interval of length L: (4/h^2) sin^2(k h' / 2), h = L/(m+1), h' = pi h / L.
inline std::vector<double> discrete_dirichlet_laplacian(std::size_t m, double length) {
  const double h = length / static_cast<double>(m + 1);
  std::vector<double> out(m);
  for (std::size_t k = 1; k <= m; ++k) {
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi / static_cast<double>(m + 1) / 2.0);
    out[k - 1] = 4.0 / (h * h) * s * s;
  }
  return out;
}

// -u'' + (nu^2 - 1/4)/x^2 u + mu x^2 u on (0, inf): sqrt(mu) (4k + 2 nu + 2).
inline double radial_oscillator(double mu, double nu, int k) { return std::sqrt(mu) * (4.0 * k + 2.0 * nu + 2.0); }

}  // namespace oracle
