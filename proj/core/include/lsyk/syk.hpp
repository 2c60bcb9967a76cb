#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsyk/pauli.hpp"
#include "lsyk/stable.hpp"

namespace lsyk {

enum class Deformation { none, defect, mass };

std::string to_string(Deformation d);
Deformation parse_deformation(const std::string& text);

struct SykConfig {
  int N = 16;
  int q = 4;
  double J = 1.0;
  double mu = 2.0;
  std::uint64_t seed = 0;
  Deformation deformation = Deformation::none;
  int defect_site = 1;
  Sector sector = Sector::even;

  void validate() const;
  /// Deformed Hamiltonians live in the full space.
  Sector effective_sector() const { return deformation == Deformation::none ? sector : Sector::full; }
};

/// SYK terms J_I Psi_I in lexicographic order, then deformation terms of weight 1/N each.
std::vector<Term> hamiltonian_terms(const SykConfig& config, const CouplingTensor& couplings);
HermitianMatrix build_hamiltonian(const SykConfig& config, const CouplingTensor& couplings);

struct Disc {
  double center;
  double radius;
};

std::vector<Disc> gershgorin_discs(const HermitianMatrix& h);
/// True when every value lies in the union of the discs (closed intervals on the real line).
bool inside_disc_union(const std::vector<Disc>& discs, const std::vector<double>& values, double slack = 0.0);

struct TopK {
  std::size_t k;
};
struct MagnitudeCutoff {
  double cutoff;
};

struct TermSplit {
  std::vector<Term> outliers;    ///< sorted by |coupling|, descending
  std::vector<Term> background;  ///< original order
};

TermSplit split_terms(const std::vector<Term>& terms, TopK policy);
TermSplit split_terms(const std::vector<Term>& terms, MagnitudeCutoff policy);

}  // namespace lsyk
