#include "edgespec/report_io.hpp"

#include <fmt/core.h>

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace edgespec {

namespace {

std::string g17(double v) { return fmt::format("{:.17g}", v); }

// JSON has no infinity; keep the value readable instead of failing.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

}  // namespace

void write_count_csv(std::ostream& out, std::span<const CountReport> rows) {
  out << "lambda,B,kind,bc,count,bound_value,ratio,j_used\n";
  for (const auto& r : rows) {
    out << g17(r.lambda) << ',' << g17(r.region.B) << ',' << to_string(r.region.kind) << ',' << to_string(r.region.bc)
        << ',' << r.count << ',' << g17(r.bound_value) << ',' << g17(r.ratio) << ',' << r.j_used << '\n';
  }
}

void write_density_csv(std::ostream& out, const RadialDensity& density) {
  out << "x,f\n";
  for (std::size_t i = 0; i < density.values.size(); ++i) {
    out << g17(density.grid.nodes[i]) << ',' << g17(density.values[i]) << '\n';
  }
}

void write_eigenvalues_csv(std::ostream& out, std::span<const ModelEigenvalue> rows) {
  out << "mu,multiplicity,k,alpha\n";
  for (const auto& r : rows) out << g17(r.mu) << ',' << r.multiplicity << ',' << r.k << ',' << g17(r.alpha) << '\n';
}

Json to_json(const MomentReport& report) {
  Json tails = Json::array();
  for (const auto& [k, F] : report.tail_masses) tails.push_back(Json{{"k", k}, {"F", number(F)}});
  return Json{{"lambda", number(report.lambda)},
              {"p", number(report.p)},
              {"moment", number(report.moment)},
              {"wasserstein", number(report.wasserstein)},
              {"tails", tails}};
}

Json to_json(const FitResult& fit) {
  Json j{{"slope", number(fit.slope)},
         {"intercept", number(fit.intercept)},
         {"max_ratio", number(fit.max_ratio)},
         {"min_ratio", number(fit.min_ratio)},
         {"r_squared", number(fit.r_squared)}};
  j["theory_slope"] = fit.theory_slope ? number(*fit.theory_slope) : Json(nullptr);
  return j;
}

Json to_json(const CountReport& r) {
  return Json{{"lambda", number(r.lambda)}, {"B", number(r.region.B)},         {"kind", to_string(r.region.kind)},
              {"bc", to_string(r.region.bc)}, {"count", r.count},              {"bound_value", number(r.bound_value)},
              {"ratio", number(r.ratio)},     {"j_used", r.j_used}};
}

Json to_json(const RateCheck& c) {
  Json rows = Json::array();
  for (const auto& p : c.rows) {
    Json row{{"lambda", number(p.lambda)},
             {"n_lambda", p.n_lambda},
             {"rate", number(p.rate)},
             {"moment", number(p.moment)},
             {"wasserstein", number(p.wasserstein)},
             {"ratio", number(p.ratio)}};
    if (c.p == 1.0) {
      row["tail"] = number(p.tail);
      row["tail_ratio"] = number(p.tail_ratio);
    }
    row["bootstrap_constant"] = number(p.bootstrap_constant);
    rows.push_back(row);
  }
  Json j{{"p", number(c.p)}, {"rate", to_string(c.rate)}, {"fit", to_json(c.fit)}, {"ratio_fit", to_json(c.ratio_fit)}};
  if (c.p == 1.0) j["tail_fit"] = to_json(c.tail_fit);
  j["passed"] = c.passed;
  j["rows"] = rows;
  return j;
}

Json to_json(const WeylCheck& w) {
  Json rows = Json::array();
  for (const auto& [lambda, n] : w.rows) rows.push_back(Json{{"lambda", number(lambda)}, {"n_lambda", n}});
  return Json{{"critical", w.critical}, {"fit", to_json(w.fit)}, {"passed", w.passed}, {"rows", rows}};
}

Json to_json(const CheckResult& c) { return Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}}; }

Json to_json(const LocalisationResult& r) {
  return Json{{"lambda", number(r.lambda)},         {"n_lambda", r.n_lambda}, {"lhs", number(r.lhs)},
              {"trace_term", number(r.trace_term)}, {"error_term", number(r.error_term)},
              {"rhs", number(r.rhs)},               {"holds", r.holds}};
}

Json rate_sweep_json(const RateSweep& sweep, const std::string& config_echo) {
  Json rows = Json::array();
  Json fits = Json::object();
  fits["weyl"] = to_json(sweep.weyl);
  for (const auto& rc : sweep.rates) {
    const Json rj = to_json(rc);
    for (const auto& row : rj["rows"]) {
      Json r = row;
      r["p"] = number(rc.p);
      rows.push_back(r);
    }
    Json f = rj;
    f.erase("rows");
    fits[fmt::format("p={}", rc.p)] = f;
  }
  return Json{{"config_echo", config_echo}, {"rows", rows}, {"fits", fits}, {"passed", sweep.passed}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

}  // namespace edgespec
