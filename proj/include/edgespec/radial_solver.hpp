#pragma once

// Finite-difference discretization of the one-dimensional family
//
//   P_mu = -d^2/dx^2 + c / x^2 + mu x^beta      on [a, b]
//
// as symmetric tridiagonal matrices, with exact eigenvalue counting by
// Sturm sequences and eigenpairs by bisection plus inverse iteration.
//
// Mesh: h = (b - a) / (mesh_nodes + 1), vertex-centred. A Dirichlet end
// drops its endpoint node; a Neumann end keeps it with half quadrature
// weight h/2. The generalized problem K u = alpha W u (K the 3-point
// stiffness form, W the trapezoid weights) is symmetrized as
// S = W^{-1/2} K W^{-1/2} + diag(V). Interior entries are 2/h^2 on the
// diagonal and -1/h^2 off it; the link to a Neumann endpoint is
// -sqrt(2)/h^2. Matrix eigenvectors v relate to nodal values through
// u = v / sqrt(w), so |v|_2 = 1 is the discrete L^2(dx) normalization.
//
// The singular end a = 0 is always cut off Dirichlet-style with the first
// node at x = h; c >= 3/4 puts the operator in the limit-point case there.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "edgespec/model_params.hpp"

namespace edgespec {

struct Interval {
  double a = 0.0;
  double b = 1.0;
  double length() const { return b - a; }
};

struct BoundaryCondition {
  Bc left = Bc::Dirichlet;
  Bc right = Bc::Dirichlet;
};

struct Mesh {
  std::vector<double> nodes;
  std::vector<double> weights;
  double h = 0.0;
  bool left_endpoint = false;   // nodes.front() sits on a Neumann end
  bool right_endpoint = false;  // nodes.back() sits on a Neumann end

  std::size_t size() const { return nodes.size(); }
  // Every node, weight and the spacing multiplied by s.
  Mesh scaled(double s) const;
};

Mesh uniform_mesh(Interval interval, BoundaryCondition bc, int mesh_nodes);

struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }
  double norm() const;  // max absolute row sum
  double gershgorin_lower() const;
  double gershgorin_upper() const;
};

struct RadialPotential {
  double c_inv_sq = 0.0;  // coefficient of 1/x^2
  double mu = 0.0;        // coefficient of x^beta
  double beta = 2.0;

  double operator()(double x) const;
};

struct TridiagOperator {
  SymTridiag matrix;
  Mesh mesh;
  BoundaryCondition bc;
  double mu = 0.0;
  Interval interval;
};

TridiagOperator assemble_on_mesh(const RadialPotential& potential, const Mesh& mesh, BoundaryCondition bc,
                                 Interval interval);
TridiagOperator assemble_radial(const RadialPotential& potential, Interval interval, BoundaryCondition bc,
                                int mesh_nodes);
TridiagOperator assemble_radial(const ModelParams& params, double mu, Interval interval, BoundaryCondition bc,
                                int mesh_nodes);

// Interior node count used for an interval when eigenvalues below lambda matter:
// params.mesh_nodes if nonzero, else max(mesh_floor, ceil(kappa (b - a) sqrt(lambda))).
int mesh_nodes_for(const ModelParams& params, Interval interval, double lambda);

// Number of eigenvalues strictly below lambda (LDL^T inertia of T - lambda).
// Pivots with |d| < pivmin are replaced by +pivmin, so an eigenvalue equal to
// lambda is not counted as below it.
std::size_t sturm_count(const SymTridiag& t, double lambda);

inline constexpr std::size_t kNoBudget = std::numeric_limits<std::size_t>::max();

// All eigenvalues strictly below lambda, ascending, each bisected to 1e-12
// relative width (or floating-point resolution). Throws InfeasibleError when
// more than `budget` eigenvalues lie below lambda.
std::vector<double> eigenvalues_below(const SymTridiag& t, double lambda, std::size_t budget = kNoBudget);

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'2024'0bad'cafeULL;

// Unit-length eigenvector for the eigenvalue closest to alpha by inverse
// iteration (at most five steps, deterministic start from `seed`), kept
// orthogonal to `deflate`. Residual |T v - alpha v| <= 1e-8 |T|.
std::vector<double> eigenvector(const SymTridiag& t, double alpha, std::uint64_t seed = kDefaultSeed,
                                std::span<const std::vector<double>> deflate = {});

struct EigenPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  // matrix eigenvectors, |v|_2 = 1
};

// Eigenpairs below lambda. Near-degenerate clusters (gap <= 1e-3 |T|) get an
// orthonormal basis by deflating against earlier members.
EigenPairs eigenpairs_below(const SymTridiag& t, double lambda, std::uint64_t seed = kDefaultSeed,
                            std::size_t budget = kNoBudget);

// Nodal values u = v / sqrt(w); sum_i w_i u_i^2 = |v|^2.
std::vector<double> nodal_values(const Mesh& mesh, std::span<const double> v);

inline constexpr std::size_t kDenseOracleMax = 400;

// Cyclic Jacobi on the dense symmetrization. Rejects size > 400.
std::vector<double> dense_oracle_eigs(const SymTridiag& t);

struct DenseEigenSystem {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] belongs to values[k]
};
DenseEigenSystem dense_oracle_eigensystem(const SymTridiag& t);

struct RescaledProblem {
  Interval interval;
  double lambda_scale = 1.0;
  double length_scale = 1.0;
};

// P_mu on [a, b] is unitarily equivalent to lambda_scale * P_1 on
// [s a, s b] with s = mu^{1/(2+beta)} and lambda_scale = s^2.
RescaledProblem rescaled_problem(const ModelParams& params, double mu, Interval interval);

// Sum of the positive eigenvalues of D (shift I - T) D with D = diag(chi).
double trace_plus_weighted(const SymTridiag& t, std::span<const double> chi, double shift);

// Operators P_mu for many mu on one fixed mesh. The mu-independent part of
// the diagonal and the x^beta profile are computed once.
class RadialFamily {
 public:
  RadialFamily(const ModelParams& params, Interval interval, BoundaryCondition bc, int mesh_nodes);

  const Mesh& mesh() const { return mesh_; }
  Interval interval() const { return interval_; }
  BoundaryCondition bc() const { return bc_; }
  const std::vector<double>& offdiag() const { return offdiag_; }

  SymTridiag matrix(double mu) const;
  TridiagOperator op(double mu) const;
  // sturm_count(matrix(mu), lambda) without materializing the matrix.
  std::size_t count(double mu, double lambda) const;

 private:
  Mesh mesh_;
  Interval interval_;
  BoundaryCondition bc_;
  std::vector<double> base_diag_;
  std::vector<double> x_beta_;
  std::vector<double> offdiag_;
  std::vector<double> off_sq_;
  double pivmin_ = 0.0;
};

}  // namespace edgespec
