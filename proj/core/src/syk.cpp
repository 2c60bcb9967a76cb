#include "lsyk/syk.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

#include "lsyk/errors.hpp"

namespace lsyk {

std::string to_string(Deformation d) {
  switch (d) {
    case Deformation::defect: return "defect";
    case Deformation::mass: return "mass";
    default: return "none";
  }
}

Deformation parse_deformation(const std::string& text) {
  if (text == "none") return Deformation::none;
  if (text == "defect") return Deformation::defect;
  if (text == "mass") return Deformation::mass;
  throw ParameterError("unknown deformation '" + text + "' (expected none, defect or mass)");
}

void SykConfig::validate() const {
  require(N >= 2 && N % 2 == 0, "SykConfig: N must be even and >= 2");
  require(N <= 30, "SykConfig: dense diagonalization supports N <= 30");
  require(q >= 2 && q % 2 == 0 && q <= N, "SykConfig: q must be even with 2 <= q <= N");
  require(J > 0.0, "SykConfig: J must be positive");
  require(mu > 0.0 && mu <= 2.0, "SykConfig: mu must lie in (0, 2]");
  require(defect_site >= 1 && defect_site <= N, "SykConfig: defect site out of range");
}

std::vector<Term> hamiltonian_terms(const SykConfig& config, const CouplingTensor& couplings) {
  config.validate();
  require(couplings.n_fermions == config.N && couplings.q == config.q,
          "hamiltonian_terms: coupling tensor does not match (N, q)");
  require(couplings.values.size() == binomial(config.N, config.q), "hamiltonian_terms: coupling tensor has wrong length");
  std::vector<Term> terms;
  terms.reserve(couplings.values.size());
  std::vector<int> tuple(config.q);
  std::iota(tuple.begin(), tuple.end(), 1);
  for (double value : couplings.values) {
    terms.push_back({value, majorana_string(tuple, config.N)});
    next_combination(tuple, config.N);
  }
  const double weight = 1.0 / config.N;
  if (config.deformation == Deformation::defect) {
    terms.push_back({weight, majorana(config.defect_site, config.N)});
  } else if (config.deformation == Deformation::mass) {
    for (int i = 1; i <= config.N; ++i)
      for (int j = i + 1; j <= config.N; ++j) {
        const int pair[2] = {i, j};
        terms.push_back({weight, majorana_string(pair, config.N)});
      }
  }
  return terms;
}

HermitianMatrix build_hamiltonian(const SykConfig& config, const CouplingTensor& couplings) {
  const std::vector<Term> terms = hamiltonian_terms(config, couplings);
  return sector_matrix(terms, config.effective_sector(), config.N);
}

std::vector<Disc> gershgorin_discs(const HermitianMatrix& h) {
  const Eigen::Index dim = h.dim();
  std::vector<Disc> discs(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    double radius = h.is_real ? h.real.row(i).cwiseAbs().sum() : h.complex.row(i).cwiseAbs().sum();
    const double center = h(i, i).real();
    radius -= std::abs(h(i, i));
    discs[static_cast<std::size_t>(i)] = {center, std::max(radius, 0.0)};
  }
  return discs;
}

bool inside_disc_union(const std::vector<Disc>& discs, const std::vector<double>& values, double slack) {
  std::vector<std::pair<double, double>> intervals;
  intervals.reserve(discs.size());
  for (const Disc& d : discs) intervals.emplace_back(d.center - d.radius - slack, d.center + d.radius + slack);
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.first <= merged.back().second) merged.back().second = std::max(merged.back().second, iv.second);
    else merged.push_back(iv);
  }
  for (double v : values) {
    auto it = std::upper_bound(merged.begin(), merged.end(), std::make_pair(v, std::numeric_limits<double>::infinity()));
    if (it == merged.begin() || std::prev(it)->second < v) return false;
  }
  return true;
}

namespace {

TermSplit split_by_rank(const std::vector<Term>& terms, std::size_t n_outliers) {
  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(terms[a].coupling) > std::abs(terms[b].coupling); });
  std::vector<bool> is_outlier(terms.size(), false);
  TermSplit split;
  for (std::size_t k = 0; k < n_outliers; ++k) {
    split.outliers.push_back(terms[order[k]]);
    is_outlier[order[k]] = true;
  }
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (!is_outlier[i]) split.background.push_back(terms[i]);
  return split;
}

}  // namespace

TermSplit split_terms(const std::vector<Term>& terms, TopK policy) {
  require(!terms.empty(), "split_terms: empty term list");
  return split_by_rank(terms, std::min(policy.k, terms.size()));
}

TermSplit split_terms(const std::vector<Term>& terms, MagnitudeCutoff policy) {
  require(!terms.empty(), "split_terms: empty term list");
  require(policy.cutoff >= 0.0, "split_terms: cutoff must be non-negative");
  const auto n = static_cast<std::size_t>(std::count_if(
      terms.begin(), terms.end(), [&](const Term& t) { return std::abs(t.coupling) >= policy.cutoff; }));
  return split_by_rank(terms, n);
}

}  // namespace lsyk
