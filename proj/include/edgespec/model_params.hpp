#pragma once

#include <string>

namespace edgespec {

enum class Bc { Dirichlet, Neumann };

// Constants of one instance of the separable model operator
//
//   -d^2/dx^2 + C_beta / x^2 + x^beta * Delta_M   on  (0, x_max] x M,
//
// in the coordinates where the measure is dx dv_G. C_beta and the Weyl
// exponent d are derived from (n, beta) and never stored separately.
struct ModelParams {
  int n = 1;                 // dimension of the boundary manifold M
  double beta = 2.0;         // singularity exponent, beta * n >= 2
  double eps = 1.0;          // collar parameter, in (0, 1]
  double x_max = 1.0;        // cylinder length
  int mesh_nodes = 0;        // fixed interior node count; 0 selects the kappa policy
  double kappa = 10.0;       // nodes per unit length per sqrt(lambda)
  int mesh_floor = 16;       // minimum interior node count under the policy
  double delta_slack = 0.0;  // quasi-isometry slack; trace shifts use 2(1+delta)^2
  Bc outer_bc = Bc::Neumann; // condition at x = x_max

  // Throws std::domain_error if any field is outside its admissible range.
  void validate() const;

  double c_beta() const;
  double d() const { return n * (1.0 + beta / 2.0); }
  double beta_n() const { return beta * n; }
  bool critical() const;     // beta * n == 2 (to 1e-12)
  double trace_shift_factor() const { return 2.0 * (1.0 + delta_slack) * (1.0 + delta_slack); }
};

// (beta n / 4)(1 + beta n / 4). Rejects beta * n < 2.
double c_beta(int n, double beta);

enum class RateKind { Power, LogLogOverLog, OneOverLog, LogOverLinear };

// Convergence rate A_lambda of the first moment (p = 1) or of the p-th
// moment (p >= 2) of the eigenfunction density toward the boundary.
struct RateSpec {
  RateKind kind = RateKind::Power;
  double exponent = 0.0;  // only meaningful for Power
  double p = 1.0;

  bool is_power() const { return kind == RateKind::Power; }
};

// Rejects p in (1, 2) and p < 1.
RateSpec theoretical_rate(const ModelParams& params, double p);

// A_lambda for lambda > e.
double eval_rate(const RateSpec& rate, double lambda);

std::string to_string(const RateSpec& rate);
std::string to_string(Bc bc);
Bc parse_bc(const std::string& text);

}  // namespace edgespec
