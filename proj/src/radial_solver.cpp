#include "edgespec/radial_solver.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>
#include <stdexcept>

#include "edgespec/errors.hpp"

namespace edgespec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBisectRelTol = 1e-12;
constexpr double kClusterRelGap = 1e-3;
constexpr double kResidualRelTol = 1e-8;
constexpr int kMaxInverseSteps = 5;

double pivmin_for(std::span<const double> offdiag) {
  double bmax2 = 0.0;
  for (double b : offdiag) bmax2 = std::max(bmax2, b * b);
  return DBL_MIN * std::max(1.0, bmax2);
}

// Inertia count shared by sturm_count and RadialFamily::count. diag_at(i)
// yields the i-th diagonal entry.
template <typename DiagAt>
std::size_t inertia_below(std::size_t m, DiagAt diag_at, std::span<const double> off_sq, double pivmin,
                          double lambda) {
  if (m == 0) return 0;
  std::size_t neg = 0;
  double d = diag_at(0) - lambda;
  if (std::abs(d) < pivmin) d = pivmin;
  if (d < 0.0) ++neg;
  for (std::size_t i = 1; i < m; ++i) {
    d = (diag_at(i) - lambda) - off_sq[i - 1] / d;
    if (std::abs(d) < pivmin) d = pivmin;
    if (d < 0.0) ++neg;
  }
  return neg;
}

std::vector<double> squares(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
  return out;
}

double uniform_pm1(std::mt19937_64& rng) {
  // 53 random bits mapped to [-1, 1); independent of the standard library's
  // distribution implementation so outputs are portable.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

// Gaussian elimination with partial pivoting of the tridiagonal T - shift I.
// U has the main diagonal d, first superdiagonal e and second superdiagonal f.
class ShiftedTridiagLU {
 public:
  ShiftedTridiagLU(const SymTridiag& t, double shift, double tiny) : m_(t.size()) {
    d_.resize(m_);
    e_.assign(m_, 0.0);
    f_.assign(m_, 0.0);
    mult_.assign(m_, 0.0);
    swapped_.assign(m_, false);
    for (std::size_t i = 0; i < m_; ++i) d_[i] = t.diag[i] - shift;
    for (std::size_t i = 0; i + 1 < m_; ++i) e_[i] = t.offdiag[i];
    for (std::size_t k = 0; k + 1 < m_; ++k) {
      const double sub = t.offdiag[k];
      if (std::abs(d_[k]) >= std::abs(sub)) {
        if (d_[k] == 0.0) d_[k] = tiny;
        const double l = sub / d_[k];
        mult_[k] = l;
        d_[k + 1] -= l * e_[k];
      } else {
        // Swap rows k and k+1, then eliminate below the new pivot `sub`.
        const double l = d_[k] / sub;
        mult_[k] = l;
        swapped_[k] = true;
        const double old_dk1 = d_[k + 1];
        const double old_ek1 = (k + 2 < m_) ? e_[k + 1] : 0.0;
        const double old_ek = e_[k];
        d_[k] = sub;
        e_[k] = old_dk1;
        f_[k] = old_ek1;
        d_[k + 1] = old_ek - l * old_dk1;
        if (k + 2 < m_) e_[k + 1] = -l * old_ek1;
      }
    }
    for (double& x : d_) {
      if (std::abs(x) < tiny) x = std::copysign(tiny, x == 0.0 ? 1.0 : x);
    }
  }

  void solve(std::vector<double>& rhs) const {
    for (std::size_t k = 0; k + 1 < m_; ++k) {
      if (swapped_[k]) std::swap(rhs[k], rhs[k + 1]);
      rhs[k + 1] -= mult_[k] * rhs[k];
    }
    for (std::size_t ii = m_; ii-- > 0;) {
      double s = rhs[ii];
      if (ii + 1 < m_) s -= e_[ii] * rhs[ii + 1];
      if (ii + 2 < m_) s -= f_[ii] * rhs[ii + 2];
      rhs[ii] = s / d_[ii];
    }
  }

 private:
  std::size_t m_;
  std::vector<double> d_, e_, f_, mult_;
  std::vector<bool> swapped_;
};

double residual_norm(const SymTridiag& t, std::span<const double> v, double alpha) {
  const std::size_t m = t.size();
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = (t.diag[i] - alpha) * v[i];
    if (i > 0) r += t.offdiag[i - 1] * v[i - 1];
    if (i + 1 < m) r += t.offdiag[i] * v[i + 1];
    s += r * r;
  }
  return std::sqrt(s);
}

bool try_inverse_iteration(const SymTridiag& t, double shift, double alpha, std::uint64_t seed,
                           std::span<const std::vector<double>> deflate, double tnorm, std::vector<double>& out) {
  const std::size_t m = t.size();
  const ShiftedTridiagLU lu(t, shift, kEps * std::max(tnorm, DBL_MIN));
  std::mt19937_64 rng(seed);
  std::vector<double> x(m);
  for (double& xi : x) xi = uniform_pm1(rng);
  const double tol = kResidualRelTol * std::max(tnorm, DBL_MIN);
  for (int step = 0; step < kMaxInverseSteps; ++step) {
    lu.solve(x);
    for (const auto& q : deflate) {
      const double c = dot(x, q);
      for (std::size_t i = 0; i < m; ++i) x[i] -= c * q[i];
    }
    const double nx = norm2(x);
    if (!(nx > 0.0) || !std::isfinite(nx)) return false;
    for (double& xi : x) xi /= nx;
    if (residual_norm(t, x, alpha) <= tol) {
      // Fix the sign so the largest-magnitude component is positive.
      const auto it = std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
      if (*it < 0.0) {
        for (double& xi : x) xi = -xi;
      }
      out = std::move(x);
      return true;
    }
  }
  return false;
}

}  // namespace

Mesh Mesh::scaled(double s) const {
  Mesh out = *this;
  for (double& x : out.nodes) x *= s;
  for (double& w : out.weights) w *= s;
  out.h *= s;
  return out;
}

Mesh uniform_mesh(Interval interval, BoundaryCondition bc, int mesh_nodes) {
  if (mesh_nodes < 3) throw std::domain_error("uniform_mesh: need at least 3 interior nodes");
  if (!(interval.b > interval.a) || interval.a < 0.0) {
    throw std::domain_error(fmt::format("uniform_mesh: degenerate interval [{}, {}]", interval.a, interval.b));
  }
  if (interval.a == 0.0 && bc.left == Bc::Neumann) {
    throw std::domain_error("uniform_mesh: the singular end x = 0 admits only the Dirichlet cutoff");
  }
  const std::size_t cells = static_cast<std::size_t>(mesh_nodes) + 1;
  Mesh mesh;
  mesh.h = interval.length() / static_cast<double>(cells);
  mesh.left_endpoint = bc.left == Bc::Neumann;
  mesh.right_endpoint = bc.right == Bc::Neumann;
  const std::size_t first = mesh.left_endpoint ? 0 : 1;
  const std::size_t last = mesh.right_endpoint ? cells : cells - 1;
  mesh.nodes.reserve(last - first + 1);
  mesh.weights.reserve(last - first + 1);
  for (std::size_t i = first; i <= last; ++i) {
    mesh.nodes.push_back(i == cells ? interval.b : interval.a + static_cast<double>(i) * mesh.h);
    const bool end = (i == 0) || (i == cells);
    mesh.weights.push_back(end ? 0.5 * mesh.h : mesh.h);
  }
  return mesh;
}

double SymTridiag::norm() const {
  double best = 0.0;
  const std::size_t m = size();
  for (std::size_t i = 0; i < m; ++i) {
    double r = std::abs(diag[i]);
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i + 1 < m) r += std::abs(offdiag[i]);
    best = std::max(best, r);
  }
  return best;
}

double SymTridiag::gershgorin_lower() const {
  double lo = std::numeric_limits<double>::infinity();
  const std::size_t m = size();
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i + 1 < m) r += std::abs(offdiag[i]);
    lo = std::min(lo, diag[i] - r);
  }
  return lo;
}

double SymTridiag::gershgorin_upper() const {
  double hi = -std::numeric_limits<double>::infinity();
  const std::size_t m = size();
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i + 1 < m) r += std::abs(offdiag[i]);
    hi = std::max(hi, diag[i] + r);
  }
  return hi;
}

double RadialPotential::operator()(double x) const {
  double v = c_inv_sq / (x * x);
  if (mu != 0.0) v += mu * std::pow(x, beta);
  return v;
}

namespace {

// Kinetic part of S = W^{-1/2} K W^{-1/2}: 2/h^2 on every diagonal entry
// (interior 2/(h*h); Neumann end (1/h) / (h/2)), off-diagonal -1/h^2 except
// -sqrt(2)/h^2 on a link that touches a Neumann endpoint.
void kinetic_entries(const Mesh& mesh, std::vector<double>& diag, std::vector<double>& off) {
  const std::size_t m = mesh.size();
  const double inv_h2 = 1.0 / (mesh.h * mesh.h);
  diag.assign(m, 2.0 * inv_h2);
  off.assign(m > 0 ? m - 1 : 0, -inv_h2);
  if (m >= 2) {
    if (mesh.left_endpoint) off.front() = -std::sqrt(2.0) * inv_h2;
    if (mesh.right_endpoint) off.back() = -std::sqrt(2.0) * inv_h2;
  }
}

}  // namespace

TridiagOperator assemble_on_mesh(const RadialPotential& potential, const Mesh& mesh, BoundaryCondition bc,
                                 Interval interval) {
  if (!(potential.mu >= 0.0)) throw std::domain_error("assemble: mu must be >= 0");
  TridiagOperator op;
  kinetic_entries(mesh, op.matrix.diag, op.matrix.offdiag);
  for (std::size_t i = 0; i < mesh.size(); ++i) op.matrix.diag[i] += potential(mesh.nodes[i]);
  op.mesh = mesh;
  op.bc = bc;
  op.mu = potential.mu;
  op.interval = interval;
  return op;
}

TridiagOperator assemble_radial(const RadialPotential& potential, Interval interval, BoundaryCondition bc,
                                int mesh_nodes) {
  return assemble_on_mesh(potential, uniform_mesh(interval, bc, mesh_nodes), bc, interval);
}

TridiagOperator assemble_radial(const ModelParams& params, double mu, Interval interval, BoundaryCondition bc,
                                int mesh_nodes) {
  if (interval.b > params.x_max * (1.0 + 1e-12)) throw std::domain_error("assemble_radial: interval exceeds x_max");
  return assemble_radial(RadialPotential{params.c_beta(), mu, params.beta}, interval, bc, mesh_nodes);
}

int mesh_nodes_for(const ModelParams& params, Interval interval, double lambda) {
  if (params.mesh_nodes > 0) return params.mesh_nodes;
  const double want = std::ceil(params.kappa * interval.length() * std::sqrt(std::max(lambda, 0.0)));
  return std::max(params.mesh_floor, static_cast<int>(std::min(want, 1e8)));
}

std::size_t sturm_count(const SymTridiag& t, double lambda) {
  const std::vector<double> off_sq = squares(t.offdiag);
  return inertia_below(
      t.size(), [&](std::size_t i) { return t.diag[i]; }, off_sq, pivmin_for(t.offdiag), lambda);
}

std::vector<double> eigenvalues_below(const SymTridiag& t, double lambda, std::size_t budget) {
  const std::vector<double> off_sq = squares(t.offdiag);
  const double pivmin = pivmin_for(t.offdiag);
  auto count = [&](double x) {
    return inertia_below(
        t.size(), [&](std::size_t i) { return t.diag[i]; }, off_sq, pivmin, x);
  };
  const std::size_t total = count(lambda);
  if (total > budget) {
    throw InfeasibleError(fmt::format("eigenvalues_below: {} eigenvalues below {} exceed the budget {}", total,
                                      lambda, budget));
  }
  std::vector<double> out;
  if (total == 0) return out;
  out.reserve(total);

  double lo = t.gershgorin_lower();
  lo -= 2.0 * kEps * std::max(std::abs(lo), t.norm()) + pivmin;
  while (count(lo) > 0) lo -= std::max(1.0, std::abs(lo));

  struct Bracket {
    double lo, hi;
    std::size_t clo, chi;
  };
  // Depth-first, lower half first, so eigenvalues come out ascending.
  std::vector<Bracket> stack{{lo, lambda, 0, total}};
  while (!stack.empty()) {
    const Bracket br = stack.back();
    stack.pop_back();
    if (br.chi == br.clo) continue;
    const double mid = 0.5 * (br.lo + br.hi);
    const double scale = std::max(std::abs(br.lo), std::abs(br.hi));
    const bool narrow = (br.hi - br.lo) <= kBisectRelTol * scale || mid <= br.lo || mid >= br.hi;
    if (narrow) {
      for (std::size_t k = br.clo; k < br.chi; ++k) out.push_back(mid);
      continue;
    }
    const std::size_t cm = count(mid);
    stack.push_back({mid, br.hi, cm, br.chi});
    stack.push_back({br.lo, mid, br.clo, cm});
  }
  return out;
}

std::vector<double> eigenvector(const SymTridiag& t, double alpha, std::uint64_t seed,
                                std::span<const std::vector<double>> deflate) {
  if (t.size() == 0) throw std::invalid_argument("eigenvector: empty matrix");
  const double tnorm = t.norm();
  std::vector<double> v;
  if (try_inverse_iteration(t, alpha, alpha, seed, deflate, tnorm, v)) return v;
  // Retry from a perturbed shift and a fresh start vector.
  const double perturbed = alpha + 10.0 * kEps * std::max(tnorm, std::abs(alpha));
  if (try_inverse_iteration(t, perturbed, alpha, seed ^ 0x9e3779b97f4a7c15ULL, deflate, tnorm, v)) return v;
  throw ConvergenceError(fmt::format("eigenvector: inverse iteration did not converge at alpha = {:.17g}", alpha));
}

EigenPairs eigenpairs_below(const SymTridiag& t, double lambda, std::uint64_t seed, std::size_t budget) {
  EigenPairs out;
  out.values = eigenvalues_below(t, lambda, budget);
  if (out.values.empty()) return out;
  const double gap_tol = kClusterRelGap * t.norm();
  out.vectors.reserve(out.values.size());
  std::size_t cluster_start = 0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (k > 0 && out.values[k] - out.values[k - 1] > gap_tol) cluster_start = k;
    const std::span<const std::vector<double>> deflate(out.vectors.data() + cluster_start, k - cluster_start);
    out.vectors.push_back(eigenvector(t, out.values[k], seed + 0x632be59bd9b4e019ULL * (k + 1), deflate));
  }
  return out;
}

std::vector<double> nodal_values(const Mesh& mesh, std::span<const double> v) {
  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i] / std::sqrt(mesh.weights[i]);
  return u;
}

DenseEigenSystem dense_oracle_eigensystem(const SymTridiag& t) {
  const std::size_t m = t.size();
  if (m > kDenseOracleMax) {
    throw std::domain_error(fmt::format("dense oracle limited to {} rows, got {}", kDenseOracleMax, m));
  }
  std::vector<double> a(m * m, 0.0), v(m * m, 0.0);
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * m + j]; };
  auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * m + j]; };
  for (std::size_t i = 0; i < m; ++i) {
    A(i, i) = t.diag[i];
    V(i, i) = 1.0;
    if (i + 1 < m) A(i, i + 1) = A(i + 1, i) = t.offdiag[i];
  }
  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);
  const double stop = 1e-15 * std::max(frob, DBL_MIN);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) off += A(p, q) * A(p, q);
    if (std::sqrt(off) <= stop) break;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double tt = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0);
        const double s = tt * c;
        const double tau = s / (1.0 + c);
        A(p, p) -= tt * apq;
        A(q, q) += tt * apq;
        A(p, q) = A(q, p) = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          if (r != p && r != q) {
            const double arp = A(r, p), arq = A(r, q);
            A(r, p) = A(p, r) = arp - s * (arq + tau * arp);
            A(r, q) = A(q, r) = arq + s * (arp - tau * arq);
          }
          const double vrp = V(r, p), vrq = V(r, q);
          V(r, p) = vrp - s * (vrq + tau * vrp);
          V(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return A(i, i) < A(j, j); });
  DenseEigenSystem out;
  out.values.reserve(m);
  out.vectors.reserve(m);
  for (std::size_t k : order) {
    out.values.push_back(A(k, k));
    std::vector<double> col(m);
    for (std::size_t r = 0; r < m; ++r) col[r] = V(r, k);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

std::vector<double> dense_oracle_eigs(const SymTridiag& t) { return dense_oracle_eigensystem(t).values; }

RescaledProblem rescaled_problem(const ModelParams& params, double mu, Interval interval) {
  if (!(mu > 0.0)) throw std::domain_error("rescaled_problem: mu must be positive");
  const double s = std::pow(mu, 1.0 / (2.0 + params.beta));
  return {{s * interval.a, s * interval.b}, s * s, s};
}

double trace_plus_weighted(const SymTridiag& t, std::span<const double> chi, double shift) {
  const std::size_t m = t.size();
  if (chi.size() != m) throw std::invalid_argument("trace_plus_weighted: chi length must match the matrix");
  // Positive eigenvalues of D (shift - T) D are the negatives of the
  // negative eigenvalues of D (T - shift) D.
  SymTridiag neg;
  neg.diag.resize(m);
  neg.offdiag.resize(m > 0 ? m - 1 : 0);
  for (std::size_t i = 0; i < m; ++i) neg.diag[i] = chi[i] * chi[i] * (t.diag[i] - shift);
  for (std::size_t i = 0; i + 1 < m; ++i) neg.offdiag[i] = chi[i] * chi[i + 1] * t.offdiag[i];
  double sum = 0.0;
  for (double e : eigenvalues_below(neg, 0.0)) sum -= e;
  return sum;
}

RadialFamily::RadialFamily(const ModelParams& params, Interval interval, BoundaryCondition bc, int mesh_nodes)
    : mesh_(uniform_mesh(interval, bc, mesh_nodes)), interval_(interval), bc_(bc) {
  kinetic_entries(mesh_, base_diag_, offdiag_);
  const double c = params.c_beta();
  x_beta_.resize(mesh_.size());
  for (std::size_t i = 0; i < mesh_.size(); ++i) {
    const double x = mesh_.nodes[i];
    base_diag_[i] += c / (x * x);
    x_beta_[i] = std::pow(x, params.beta);
  }
  off_sq_ = squares(offdiag_);
  pivmin_ = pivmin_for(offdiag_);
}

SymTridiag RadialFamily::matrix(double mu) const {
  SymTridiag t;
  t.diag.resize(base_diag_.size());
  for (std::size_t i = 0; i < base_diag_.size(); ++i) t.diag[i] = base_diag_[i] + mu * x_beta_[i];
  t.offdiag = offdiag_;
  return t;
}

TridiagOperator RadialFamily::op(double mu) const {
  TridiagOperator o;
  o.matrix = matrix(mu);
  o.mesh = mesh_;
  o.bc = bc_;
  o.mu = mu;
  o.interval = interval_;
  return o;
}

std::size_t RadialFamily::count(double mu, double lambda) const {
  return inertia_below(
      base_diag_.size(), [&](std::size_t i) { return base_diag_[i] + mu * x_beta_[i]; }, off_sq_, pivmin_, lambda);
}

}  // namespace edgespec
