#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace edgespec {

enum class SpectrumSource { SyntheticWeyl, FlatTorus };

inline constexpr std::size_t kDefaultSpectrumBudget = 50'000'000;

// Eigenvalues of the boundary Laplacian Delta_M, with multiplicity, sorted.
// Every eigenvalue of the source strictly below mu_cutoff is present and
// none at or above it.
class BoundarySpectrum {
 public:
  // A distinct eigenvalue and how many times it occurs.
  struct Level {
    double mu;
    std::size_t multiplicity;
  };

  BoundarySpectrum() = default;
  BoundarySpectrum(std::vector<double> mus, SpectrumSource source, std::vector<double> radii, double mu_cutoff);

  const std::vector<double>& mus() const { return mus_; }
  SpectrumSource source() const { return source_; }
  const std::vector<double>& radii() const { return radii_; }
  double mu_cutoff() const { return mu_cutoff_; }
  std::size_t size() const { return mus_.size(); }

  // Distinct eigenvalues strictly below mu_stop, ascending.
  std::vector<Level> levels_below(double mu_stop) const;

 private:
  std::vector<double> mus_;
  SpectrumSource source_ = SpectrumSource::SyntheticWeyl;
  std::vector<double> radii_;
  double mu_cutoff_ = 0.0;
};

// mu_j = j^{2/n}, j = 1, 2, ... (Weyl law with unit constant).
BoundarySpectrum synthetic_weyl_spectrum(int n, double mu_cutoff, std::size_t budget = kDefaultSpectrumBudget);

// sum_i (k_i / r_i)^2 over k in Z^n.
BoundarySpectrum flat_torus_spectrum(std::span<const double> radii, double mu_cutoff,
                                     std::size_t budget = kDefaultSpectrumBudget);

// Number of entries strictly below mu. Rejects mu > mu_cutoff.
std::size_t count_below(const BoundarySpectrum& spec, double mu);

// One-column CSV with header "mu".
void write_spectrum_csv(std::ostream& out, const BoundarySpectrum& spec);
BoundarySpectrum read_spectrum_csv(std::istream& in, SpectrumSource source, double mu_cutoff,
                                   std::vector<double> radii = {});

// Recipe for building a spectrum up to whatever cutoff a computation needs.
struct SpectrumSpec {
  SpectrumSource source = SpectrumSource::SyntheticWeyl;
  int n = 1;                  // used by the synthetic source
  std::vector<double> radii;  // used by the torus source; its length must equal n
  std::size_t budget = kDefaultSpectrumBudget;

  BoundarySpectrum build(double mu_cutoff) const;
};

std::string to_string(SpectrumSource source);
SpectrumSource parse_spectrum_source(const std::string& text);

}  // namespace edgespec
