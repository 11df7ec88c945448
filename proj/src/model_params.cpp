#include "edgespec/model_params.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace edgespec {

namespace {
constexpr double kExactTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kExactTol * std::max(1.0, std::abs(b)); }
}  // namespace

double c_beta(int n, double beta) {
  if (n < 1) throw std::domain_error("c_beta: n must be a positive integer");
  const double bn = beta * n;
  if (!(bn >= 2.0 - kExactTol)) {
    throw std::domain_error(fmt::format("c_beta: beta*n = {} < 2 is outside the admissible regime", bn));
  }
  const double q = bn / 4.0;
  return q * (1.0 + q);
}

void ModelParams::validate() const {
  if (n < 1) throw std::domain_error("model: n must be >= 1");
  if (!(beta > 0.0)) throw std::domain_error("model: beta must be positive");
  if (!(beta * n >= 2.0 - kExactTol)) throw std::domain_error("model: beta*n must be >= 2");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::domain_error("model: eps must lie in (0, 1]");
  if (!(x_max > 0.0)) throw std::domain_error("model: x_max must be positive");
  if (mesh_nodes != 0 && mesh_nodes < 3) throw std::domain_error("model: mesh_nodes must be 0 or >= 3");
  if (!(kappa > 0.0)) throw std::domain_error("model: kappa must be positive");
  if (mesh_floor < 3) throw std::domain_error("model: mesh_floor must be >= 3");
  if (!(delta_slack >= 0.0)) throw std::domain_error("model: delta_slack must be >= 0");
}

double ModelParams::c_beta() const { return edgespec::c_beta(n, beta); }

bool ModelParams::critical() const { return near(beta * n, 2.0); }

RateSpec theoretical_rate(const ModelParams& params, double p) {
  const double bn = params.beta_n();
  if (!(bn >= 2.0 - kExactTol)) throw std::domain_error("theoretical_rate: beta*n < 2");
  RateSpec r;
  r.p = p;
  if (near(p, 1.0)) {
    if (params.critical()) {
      r.kind = RateKind::LogLogOverLog;
    } else {
      r.kind = RateKind::Power;
      r.exponent = -0.5 + 1.0 / bn;
    }
    return r;
  }
  if (!(p >= 2.0)) {
    throw std::domain_error(fmt::format("theoretical_rate: p = {} is not covered (need p = 1 or p >= 2)", p));
  }
  if (params.critical()) {
    r.kind = RateKind::OneOverLog;
  } else if (near(bn, 6.0) && near(p, 2.0)) {
    r.kind = RateKind::LogOverLinear;
  } else {
    r.kind = RateKind::Power;
    r.exponent = std::max(0.5 - bn / 4.0, -1.0);
  }
  return r;
}

double eval_rate(const RateSpec& rate, double lambda) {
  if (!(lambda > std::numbers::e)) throw std::domain_error("eval_rate: lambda must exceed e");
  const double L = std::log(lambda);
  switch (rate.kind) {
    case RateKind::Power: return std::pow(lambda, rate.exponent);
    case RateKind::LogLogOverLog: return std::log(L) / L;
    case RateKind::OneOverLog: return 1.0 / L;
    case RateKind::LogOverLinear: return L / lambda;
  }
  return 0.0;
}

std::string to_string(const RateSpec& rate) {
  switch (rate.kind) {
    case RateKind::Power: return fmt::format("lambda^{:.17g}", rate.exponent);
    case RateKind::LogLogOverLog: return "log(log(lambda))/log(lambda)";
    case RateKind::OneOverLog: return "1/log(lambda)";
    case RateKind::LogOverLinear: return "log(lambda)/lambda";
  }
  return "?";
}

std::string to_string(Bc bc) { return bc == Bc::Dirichlet ? "dirichlet" : "neumann"; }

Bc parse_bc(const std::string& text) {
  if (text == "dirichlet" || text == "D") return Bc::Dirichlet;
  if (text == "neumann" || text == "N") return Bc::Neumann;
  throw std::invalid_argument("unknown boundary condition '" + text + "'");
}

}  // namespace edgespec
