#include "edgespec/config.hpp"

#include <fmt/core.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "edgespec/errors.hpp"

namespace edgespec {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"n", "beta", "eps", "x_max", "mesh_nodes", "kappa", "mesh_floor", "delta_slack", "outer_bc"}},
      {"spectrum", {"source", "radii", "budget"}},
      {"sweep",
       {"lambda_min", "lambda_max", "points", "p_values", "b_rule", "slope_tol", "weyl_tol", "bounded_slope_tol",
        "r2_min", "stability_tol"}},
      {"count", {"regions", "bc", "threshold_factor", "skip"}},
      {"run", {"lambda", "p", "threads", "seed", "out", "eigenpair_budget"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& section, const std::string& key) { return section + "." + key; }

double to_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  return v;
}

long long to_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
  return v;
}

std::uint64_t to_seed(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!t.empty() && t.front() != '-') v = std::stoull(t, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ConfigError(fmt::format("{}: '{}' is not an unsigned integer", key, text));
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_reals(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(to_real(s, key));
  return out;
}

template <typename Fn>
auto translate(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{}: {}", key, e.what()));
  }
}

std::string real(double v) { return fmt::format("{:.17g}", v); }

std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + real(v[i]);
  return s;
}

std::string skip_name(SkipPolicy s) { return s == SkipPolicy::Provable ? "provable" : "exhaustive"; }

}  // namespace

void RunConfig::validate() const {
  try {
    model.validate();
    sweep.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (spectrum.n != model.n) throw ConfigError("spectrum dimension differs from model.n");
  if (spectrum.source == SpectrumSource::FlatTorus && spectrum.radii.size() != static_cast<std::size_t>(model.n)) {
    throw ConfigError(fmt::format("spectrum.radii needs {} entries for n = {}", model.n, model.n));
  }
  for (double r : spectrum.radii) {
    if (!(r > 0.0)) throw ConfigError("spectrum.radii must be positive");
  }
  if (lambda && !(*lambda > 0.0)) throw ConfigError("run.lambda must be positive");
  if (p && !(*p == 1.0 || *p >= 2.0)) throw ConfigError("run.p must be 1 or >= 2");
  if (!(count.threshold_factor > 0.0)) throw ConfigError("count.threshold_factor must be positive");
  if (count.regions.empty()) throw ConfigError("count.regions must not be empty");
  if (out.empty()) throw ConfigError("run.out must not be empty");
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config syntax error at line {}: {}", e.line(), e.message()));
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end() || body.data().size() > 0) {
      throw ConfigError(fmt::format("unknown config section or top-level key '{}'", section));
    }
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError(fmt::format("unknown config key '{}'", where(section, key)));
      const std::string v = trim(node.data());
      const std::string k = where(section, key);
      if (section == "model") {
        if (key == "n") cfg.model.n = static_cast<int>(to_integer(v, k));
        else if (key == "beta") cfg.model.beta = to_real(v, k);
        else if (key == "eps") cfg.model.eps = to_real(v, k);
        else if (key == "x_max") cfg.model.x_max = to_real(v, k);
        else if (key == "mesh_nodes") cfg.model.mesh_nodes = static_cast<int>(to_integer(v, k));
        else if (key == "kappa") cfg.model.kappa = to_real(v, k);
        else if (key == "mesh_floor") cfg.model.mesh_floor = static_cast<int>(to_integer(v, k));
        else if (key == "delta_slack") cfg.model.delta_slack = to_real(v, k);
        else if (key == "outer_bc") cfg.model.outer_bc = translate(k, [&] { return parse_bc(v); });
      } else if (section == "spectrum") {
        if (key == "source") cfg.spectrum.source = translate(k, [&] { return parse_spectrum_source(v); });
        else if (key == "radii") cfg.spectrum.radii = to_reals(v, k);
        else if (key == "budget") cfg.spectrum.budget = static_cast<std::size_t>(to_integer(v, k));
      } else if (section == "sweep") {
        if (key == "lambda_min") cfg.sweep.lambda_min = to_real(v, k);
        else if (key == "lambda_max") cfg.sweep.lambda_max = to_real(v, k);
        else if (key == "points") cfg.sweep.points = static_cast<int>(to_integer(v, k));
        else if (key == "p_values") cfg.sweep.p_values = to_reals(v, k);
        else if (key == "b_rule") cfg.sweep.b_rule = translate(k, [&] { return parse_b_rule(v); });
        else if (key == "slope_tol") cfg.sweep.slope_tol = to_real(v, k);
        else if (key == "weyl_tol") cfg.sweep.weyl_tol = to_real(v, k);
        else if (key == "bounded_slope_tol") cfg.sweep.bounded_slope_tol = to_real(v, k);
        else if (key == "r2_min") cfg.sweep.r2_min = to_real(v, k);
        else if (key == "stability_tol") cfg.sweep.stability_tol = to_real(v, k);
      } else if (section == "count") {
        if (key == "regions") {
          cfg.count.regions.clear();
          for (const auto& r : split_list(v)) cfg.count.regions.push_back(translate(k, [&] { return parse_region_kind(r); }));
        } else if (key == "bc") {
          cfg.count.bc = translate(k, [&] { return parse_bc(v); });
        } else if (key == "threshold_factor") {
          cfg.count.threshold_factor = to_real(v, k);
        } else if (key == "skip") {
          if (v == "provable") cfg.count.skip = SkipPolicy::Provable;
          else if (v == "exhaustive") cfg.count.skip = SkipPolicy::Exhaustive;
          else throw ConfigError(fmt::format("{}: expected provable or exhaustive, got '{}'", k, v));
        }
      } else if (section == "run") {
        if (key == "lambda") cfg.lambda = to_real(v, k);
        else if (key == "p") cfg.p = to_real(v, k);
        else if (key == "threads") cfg.sweep.threads = static_cast<int>(to_integer(v, k));
        else if (key == "seed") cfg.sweep.seed = to_seed(v, k);
        else if (key == "out") cfg.out = v;
        else if (key == "eigenpair_budget") cfg.eigenpair_budget = static_cast<std::size_t>(to_integer(v, k));
      }
    }
  }
  cfg.spectrum.n = cfg.model.n;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string echo_config(const RunConfig& c) {
  std::string s;
  s += "[model]\n";
  s += fmt::format("n = {}\n", c.model.n);
  s += "beta = " + real(c.model.beta) + "\n";
  s += "eps = " + real(c.model.eps) + "\n";
  s += "x_max = " + real(c.model.x_max) + "\n";
  s += fmt::format("mesh_nodes = {}\n", c.model.mesh_nodes);
  s += "kappa = " + real(c.model.kappa) + "\n";
  s += fmt::format("mesh_floor = {}\n", c.model.mesh_floor);
  s += "delta_slack = " + real(c.model.delta_slack) + "\n";
  s += "outer_bc = " + to_string(c.model.outer_bc) + "\n";
  s += "\n[spectrum]\n";
  s += "source = " + to_string(c.spectrum.source) + "\n";
  if (!c.spectrum.radii.empty()) s += "radii = " + join_reals(c.spectrum.radii) + "\n";
  s += fmt::format("budget = {}\n", c.spectrum.budget);
  s += "\n[sweep]\n";
  s += "lambda_min = " + real(c.sweep.lambda_min) + "\n";
  s += "lambda_max = " + real(c.sweep.lambda_max) + "\n";
  s += fmt::format("points = {}\n", c.sweep.points);
  s += "p_values = " + join_reals(c.sweep.p_values) + "\n";
  s += "b_rule = " + (c.sweep.b_rule.kind == BRuleKind::Scaled   ? "scaled:" + real(c.sweep.b_rule.value)
                      : c.sweep.b_rule.kind == BRuleKind::Fixed  ? "fixed:" + real(c.sweep.b_rule.value)
                                                                 : to_string(c.sweep.b_rule)) +
       "\n";
  s += "slope_tol = " + real(c.sweep.slope_tol) + "\n";
  s += "weyl_tol = " + real(c.sweep.weyl_tol) + "\n";
  s += "bounded_slope_tol = " + real(c.sweep.bounded_slope_tol) + "\n";
  s += "r2_min = " + real(c.sweep.r2_min) + "\n";
  s += "stability_tol = " + real(c.sweep.stability_tol) + "\n";
  s += "\n[count]\n";
  std::string regions;
  for (std::size_t i = 0; i < c.count.regions.size(); ++i) regions += (i ? "," : "") + to_string(c.count.regions[i]);
  s += "regions = " + regions + "\n";
  s += "bc = " + to_string(c.count.bc) + "\n";
  s += "threshold_factor = " + real(c.count.threshold_factor) + "\n";
  s += "skip = " + skip_name(c.count.skip) + "\n";
  s += "\n[run]\n";
  if (c.lambda) s += "lambda = " + real(*c.lambda) + "\n";
  if (c.p) s += "p = " + real(*c.p) + "\n";
  s += fmt::format("seed = {}\n", c.sweep.seed);
  s += fmt::format("eigenpair_budget = {}\n", c.eigenpair_budget);
  return s;
}

}  // namespace edgespec
