#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lsyk/pauli.hpp"
#include "lsyk/stable.hpp"

namespace lsyk {

/// Hierarchy level of a coupling: |J_I| / J = N^(1/mu) Ncal^((z-1)/mu), Ncal = binomial(N, q).
double hierarchy_level(double magnitude, int n_fermions, int q, double J, double mu);

struct CensusBin {
  double z_lo;
  double z_hi;
  double predicted;  ///< Ncal^(1 - z_lo) - Ncal^(1 - z_hi)
  double observed;
};

/// Couplings binned by level; levels outside [0, 1] are clamped into the end bins.
std::vector<CensusBin> hierarchy_census(const CouplingTensor& couplings, int z_bins);
/// Slope of ln(observed) against bin centre, skipping the two clamped end bins and empty bins.
double census_slope(const std::vector<CensusBin>& bins);

/// max |J| over the sum of all other |J|; +inf for a single coupling.
double outlier_ratio(const std::vector<double>& couplings);

struct HyperEdge {
  std::vector<int> sites;
  double weight;
};

/// Couplings with |J| > cutoff * max |J|, as hyperedges over fermion sites.
std::vector<HyperEdge> interaction_graph(const CouplingTensor& couplings, double cutoff = 1e-5);

struct PairEdge {
  int i;
  int j;
  double weight;  ///< summed |J| of the hyperedges containing both sites
};

std::vector<PairEdge> project_pairs(const std::vector<HyperEdge>& edges);

struct TermClasses {
  std::vector<std::size_t> commuting;
  std::vector<std::size_t> anticommuting;
};

TermClasses classify_terms(const PauliString& dominant, const std::vector<PauliString>& others);

struct PerturbativeOptions {
  double degeneracy_cut = 1e-8;  ///< relative to |J_1|
  /// Pairs with |H'_ij| > max_mixing |H_ii - H_jj| also count as near-degenerate.
  double max_mixing = 0.5;
  /// Diagonalize each cluster of near-degenerate states in its second-order effective Hamiltonian;
  /// when false, near-degenerate pairs are simply dropped from the second-order sum.
  bool quasi_degenerate = true;
};

struct PerturbativeResult {
  std::vector<double> estimates;  ///< ascending
  std::size_t dominant_index = 0;
  double dominant_coupling = 0.0;
  std::size_t skipped_pairs = 0;  ///< near-degenerate pairs left out of the second-order sum
  std::size_t largest_cluster = 1;
  std::vector<double> diagonal;   ///< transformed diagonal, same order as the basis
  std::vector<double> radius;     ///< Gershgorin radius of the transformed matrix per row
};

/// Second-order estimate of the sector spectrum in the analytic eigenbasis of the largest term.
/// Requires |J_1| > 2 |J_2|.
PerturbativeResult perturbative_spectrum(const std::vector<Term>& terms, Sector sector, int n_fermions,
                                         const PerturbativeOptions& options = {});

/// Relabels the Majoranas so that the largest coupling multiplies chi_1 ... chi_q, which is diagonal in the
/// occupation basis together with every term built from whole occupation pairs, then applies the routine above.
/// Same spectrum as the even (odd) sector of the original Hamiltonian for sector even (odd).
PerturbativeResult perturbative_spectrum(const CouplingTensor& couplings, Sector sector,
                                         const PerturbativeOptions& options = {});

/// Exact one-dimensional 2-means: centres of the lower and upper cluster.
std::pair<double, double> two_means(std::vector<double> values);

}  // namespace lsyk
