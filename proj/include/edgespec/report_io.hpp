#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgespec/analysis.hpp"
#include "edgespec/counting.hpp"
#include "edgespec/density.hpp"
#include "edgespec/verification.hpp"

namespace edgespec {

using Json = nlohmann::ordered_json;

// CSV writers: reals at 17 significant digits, LF line endings.
// lambda,B,kind,bc,count,bound_value,ratio,j_used
void write_count_csv(std::ostream& out, std::span<const CountReport> rows);
// x,f
void write_density_csv(std::ostream& out, const RadialDensity& density);
// mu,multiplicity,k,alpha
void write_eigenvalues_csv(std::ostream& out, std::span<const ModelEigenvalue> rows);

// {lambda, p, moment, wasserstein, tails: [{k, F}]}
Json to_json(const MomentReport& report);
Json to_json(const FitResult& fit);
Json to_json(const CountReport& report);
Json to_json(const RateCheck& check);
Json to_json(const WeylCheck& check);
Json to_json(const CheckResult& check);
Json to_json(const LocalisationResult& result);

// {config_echo, rows: [...], fits: {weyl, p=...}, passed}
Json rate_sweep_json(const RateSweep& sweep, const std::string& config_echo);

// Pretty-printed with two-space indent and a trailing LF.
std::string dump(const Json& j);

// Writes `text` to `path` in binary mode; throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace edgespec
