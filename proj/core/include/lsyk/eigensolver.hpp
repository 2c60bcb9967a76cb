#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsyk/pauli.hpp"
#include "lsyk/syk.hpp"

namespace lsyk {

/// Tag stored with cached spectra; bump when the Hamiltonian convention changes.
inline constexpr const char* kNormalizationConvention = "chi2=1;var=2sigma2;deform=1/N-per-term;v1";

struct SpectrumMeta {
  int N = 0;
  int q = 4;
  double mu = 2.0;
  double J = 1.0;
  std::uint64_t seed = 0;
  Sector sector = Sector::even;
  SymmetryClass symmetry = SymmetryClass::GOE;
  Deformation deformation = Deformation::none;
  bool kramers_deduped = false;
  std::string convention = kNormalizationConvention;

  bool operator==(const SpectrumMeta&) const = default;
};

SpectrumMeta make_meta(const SykConfig& config);

struct Spectrum {
  std::vector<double> eigenvalues;  ///< ascending
  SpectrumMeta meta;
};

struct EigenOptions {
  bool check_residual = false;  ///< also compute eigenvectors and verify |Hv - lambda v|
  double residual_tol = 1e-8;   ///< relative to max |H_ij|
  double hermitian_tol = 1e-12; ///< relative to max |H_ij|
};

Spectrum full_spectrum(const HermitianMatrix& h, const SpectrumMeta& meta, const EigenOptions& options = {});

/// Keeps one level of each Kramers pair; gaps inside a pair must be <= tol * max |lambda|.
Spectrum dedupe_kramers(const Spectrum& spectrum, double tol = 1e-9);

/// Largest in-pair gap relative to max |lambda|; pairs are adjacent sorted levels.
double kramers_pair_gap(const std::vector<double>& eigenvalues);

/// Sets the solver libraries to one thread so results do not depend on scheduling.
void pin_solver_threads();

}  // namespace lsyk
