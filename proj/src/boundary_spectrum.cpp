#include "edgespec/boundary_spectrum.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "edgespec/errors.hpp"

namespace edgespec {

BoundarySpectrum::BoundarySpectrum(std::vector<double> mus, SpectrumSource source, std::vector<double> radii,
                                   double mu_cutoff)
    : mus_(std::move(mus)), source_(source), radii_(std::move(radii)), mu_cutoff_(mu_cutoff) {
  if (!std::is_sorted(mus_.begin(), mus_.end())) throw std::invalid_argument("BoundarySpectrum: mus must be sorted");
  if (!mus_.empty() && (mus_.front() < 0.0 || !(mus_.back() < mu_cutoff_))) {
    throw std::invalid_argument("BoundarySpectrum: entries must lie in [0, mu_cutoff)");
  }
}

std::vector<BoundarySpectrum::Level> BoundarySpectrum::levels_below(double mu_stop) const {
  std::vector<Level> out;
  for (std::size_t i = 0; i < mus_.size() && mus_[i] < mu_stop;) {
    std::size_t j = i + 1;
    while (j < mus_.size() && mus_[j] == mus_[i]) ++j;
    out.push_back({mus_[i], j - i});
    i = j;
  }
  return out;
}

namespace {

double weyl_mu(std::size_t j, int n) {
  const double x = static_cast<double>(j);
  if (n == 1) return x * x;
  if (n == 2) return x;
  return std::pow(x, 2.0 / n);
}

void check_budget(double estimate, std::size_t budget) {
  if (estimate > static_cast<double>(budget)) {
    throw InfeasibleError(fmt::format("boundary spectrum would hold ~{:.3g} entries, budget is {}", estimate, budget));
  }
}

// Recursive lattice enumeration over k in Z^n with partial sums below cutoff.
void enumerate_lattice(std::span<const double> radii, std::size_t dim, double partial, double cutoff,
                       std::vector<double>& out, std::size_t budget) {
  if (dim == radii.size()) {
    out.push_back(partial);
    if (out.size() > budget) throw InfeasibleError("flat torus spectrum exceeds the memory budget");
    return;
  }
  const double r = radii[dim];
  const auto kmax = static_cast<long long>(std::floor(r * std::sqrt(std::max(0.0, cutoff - partial)))) + 1;
  for (long long k = -kmax; k <= kmax; ++k) {
    const double q = static_cast<double>(k) / r;
    const double v = partial + q * q;
    if (v < cutoff) enumerate_lattice(radii, dim + 1, v, cutoff, out, budget);
  }
}

}  // namespace

BoundarySpectrum synthetic_weyl_spectrum(int n, double mu_cutoff, std::size_t budget) {
  if (n < 1) throw std::domain_error("synthetic_weyl_spectrum: n must be >= 1");
  if (!(mu_cutoff > 0.0)) throw std::domain_error("synthetic_weyl_spectrum: mu_cutoff must be positive");
  check_budget(std::ceil(std::pow(mu_cutoff, n / 2.0)), budget);
  std::vector<double> mus;
  mus.reserve(static_cast<std::size_t>(std::pow(mu_cutoff, n / 2.0)) + 1);
  for (std::size_t j = 1;; ++j) {
    const double mu = weyl_mu(j, n);
    if (!(mu < mu_cutoff)) break;
    mus.push_back(mu);
  }
  return BoundarySpectrum(std::move(mus), SpectrumSource::SyntheticWeyl, {}, mu_cutoff);
}

BoundarySpectrum flat_torus_spectrum(std::span<const double> radii, double mu_cutoff, std::size_t budget) {
  if (radii.empty()) throw std::domain_error("flat_torus_spectrum: need at least one radius");
  for (double r : radii) {
    if (!(r > 0.0)) throw std::domain_error("flat_torus_spectrum: radii must be positive");
  }
  if (!(mu_cutoff > 0.0)) throw std::domain_error("flat_torus_spectrum: mu_cutoff must be positive");
  // Lattice-point volume estimate: ball of radius sqrt(cutoff) in the scaled lattice.
  double vol = 1.0;
  const double s = std::sqrt(mu_cutoff);
  for (double r : radii) vol *= 2.0 * (r * s + 1.0);
  check_budget(vol / 4.0, budget);
  std::vector<double> mus;
  enumerate_lattice(radii, 0, 0.0, mu_cutoff, mus, budget);
  std::sort(mus.begin(), mus.end());
  return BoundarySpectrum(std::move(mus), SpectrumSource::FlatTorus, {radii.begin(), radii.end()}, mu_cutoff);
}

std::size_t count_below(const BoundarySpectrum& spec, double mu) {
  if (mu > spec.mu_cutoff()) {
    throw SpectrumIncompleteError(
        fmt::format("count_below: mu = {} exceeds the spectrum cutoff {}", mu, spec.mu_cutoff()));
  }
  const auto& m = spec.mus();
  return static_cast<std::size_t>(std::lower_bound(m.begin(), m.end(), mu) - m.begin());
}

void write_spectrum_csv(std::ostream& out, const BoundarySpectrum& spec) {
  out << "mu\n";
  for (double mu : spec.mus()) out << fmt::format("{:.17g}\n", mu);
}

BoundarySpectrum read_spectrum_csv(std::istream& in, SpectrumSource source, double mu_cutoff,
                                   std::vector<double> radii) {
  std::string line;
  if (!std::getline(in, line) || line != "mu") throw std::invalid_argument("spectrum CSV: expected header 'mu'");
  std::vector<double> mus;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(line, &used);
    if (used != line.size()) throw std::invalid_argument("spectrum CSV: bad value '" + line + "'");
    mus.push_back(v);
  }
  return BoundarySpectrum(std::move(mus), source, std::move(radii), mu_cutoff);
}

BoundarySpectrum SpectrumSpec::build(double mu_cutoff) const {
  if (source == SpectrumSource::SyntheticWeyl) return synthetic_weyl_spectrum(n, mu_cutoff, budget);
  if (radii.size() != static_cast<std::size_t>(n)) {
    throw std::domain_error(fmt::format("torus spectrum: {} radii given for n = {}", radii.size(), n));
  }
  return flat_torus_spectrum(radii, mu_cutoff, budget);
}

std::string to_string(SpectrumSource source) {
  return source == SpectrumSource::SyntheticWeyl ? "synthetic" : "torus";
}

SpectrumSource parse_spectrum_source(const std::string& text) {
  if (text == "synthetic") return SpectrumSource::SyntheticWeyl;
  if (text == "torus") return SpectrumSource::FlatTorus;
  throw std::invalid_argument("unknown spectrum source '" + text + "' (expected synthetic or torus)");
}

}  // namespace edgespec
