#include "lsyk/hierarchy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>

#include "lsyk/errors.hpp"
#include "lsyk/fit.hpp"

namespace lsyk {

double hierarchy_level(double magnitude, int n_fermions, int q, double J, double mu) {
  const double log_ncal = std::log(static_cast<double>(binomial(n_fermions, q)));
  require(log_ncal > 0.0, "hierarchy_level: need more than one coupling");
  return 1.0 + (mu * std::log(magnitude / J) - std::log(static_cast<double>(n_fermions))) / log_ncal;
}

std::vector<CensusBin> hierarchy_census(const CouplingTensor& couplings, int z_bins) {
  require(couplings.mu < 2.0, "hierarchy_census: the hierarchy needs mu < 2");
  require(z_bins >= 3, "hierarchy_census: need at least 3 bins");
  const double ncal = static_cast<double>(couplings.values.size());
  std::vector<CensusBin> bins(static_cast<std::size_t>(z_bins));
  for (int k = 0; k < z_bins; ++k) {
    const double lo = static_cast<double>(k) / z_bins, hi = static_cast<double>(k + 1) / z_bins;
    bins[static_cast<std::size_t>(k)] = {lo, hi, std::pow(ncal, 1.0 - lo) - std::pow(ncal, 1.0 - hi), 0.0};
  }
  for (double j : couplings.values) {
    if (j == 0.0) {
      bins.front().observed += 1.0;
      continue;
    }
    const double z = hierarchy_level(std::abs(j), couplings.n_fermions, couplings.q, couplings.J, couplings.mu);
    const int k = std::clamp(static_cast<int>(std::floor(z * z_bins)), 0, z_bins - 1);
    bins[static_cast<std::size_t>(k)].observed += 1.0;
  }
  return bins;
}

double census_slope(const std::vector<CensusBin>& bins) {
  std::vector<double> z, log_count;
  for (std::size_t k = 1; k + 1 < bins.size(); ++k) {
    if (bins[k].observed <= 0.0) continue;
    z.push_back(0.5 * (bins[k].z_lo + bins[k].z_hi));
    log_count.push_back(std::log(bins[k].observed));
  }
  require(z.size() >= 2, "census_slope: fewer than two populated interior bins");
  return linear_fit(z, log_count).slope;
}

double outlier_ratio(const std::vector<double>& couplings) {
  require(!couplings.empty(), "outlier_ratio: no couplings");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < couplings.size(); ++i)
    if (std::abs(couplings[i]) > std::abs(couplings[arg])) arg = i;
  double rest = 0.0;
  for (std::size_t i = 0; i < couplings.size(); ++i)
    if (i != arg) rest += std::abs(couplings[i]);
  return rest > 0.0 ? std::abs(couplings[arg]) / rest : std::numeric_limits<double>::infinity();
}

std::vector<HyperEdge> interaction_graph(const CouplingTensor& couplings, double cutoff) {
  require(cutoff >= 0.0, "interaction_graph: cutoff must be non-negative");
  double largest = 0.0;
  for (double j : couplings.values) largest = std::max(largest, std::abs(j));
  std::vector<HyperEdge> edges;
  std::vector<int> tuple(static_cast<std::size_t>(couplings.q));
  for (int k = 0; k < couplings.q; ++k) tuple[static_cast<std::size_t>(k)] = k + 1;
  for (double j : couplings.values) {
    if (std::abs(j) > cutoff * largest) edges.push_back({tuple, j});
    next_combination(tuple, couplings.n_fermions);
  }
  return edges;
}

std::vector<PairEdge> project_pairs(const std::vector<HyperEdge>& edges) {
  std::map<std::pair<int, int>, double> weights;
  for (const HyperEdge& e : edges)
    for (std::size_t a = 0; a < e.sites.size(); ++a)
      for (std::size_t b = a + 1; b < e.sites.size(); ++b) weights[{e.sites[a], e.sites[b]}] += std::abs(e.weight);
  std::vector<PairEdge> out;
  for (const auto& [key, w] : weights) out.push_back({key.first, key.second, w});
  return out;
}

TermClasses classify_terms(const PauliString& dominant, const std::vector<PauliString>& others) {
  TermClasses out;
  for (std::size_t i = 0; i < others.size(); ++i) (commutes(dominant, others[i]) ? out.commuting : out.anticommuting).push_back(i);
  return out;
}

namespace {

std::complex<double> i_power(int p) {
  static const std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[p & 3];
}

}  // namespace

PerturbativeResult perturbative_spectrum(const std::vector<Term>& terms, Sector sector, int n_fermions,
                                         const PerturbativeOptions& options) {
  require(terms.size() >= 1, "perturbative_spectrum: no terms");
  require(options.degeneracy_cut >= 0.0, "perturbative_spectrum: degeneracy cut must be non-negative");
  require(options.max_mixing > 0.0, "perturbative_spectrum: max_mixing must be positive");
  PerturbativeResult out;
  std::size_t dom = 0;
  for (std::size_t i = 1; i < terms.size(); ++i)
    if (std::abs(terms[i].coupling) > std::abs(terms[dom].coupling)) dom = i;
  double next = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (i != dom) next = std::max(next, std::abs(terms[i].coupling));
  const double j1 = std::abs(terms[dom].coupling);
  if (!(j1 > 2.0 * next))
    throw NumericalError("perturbative_spectrum: no clearly dominant term (|J1| <= 2 |J2|); use exact diagonalization");
  out.dominant_index = dom;
  out.dominant_coupling = terms[dom].coupling;

  const HermitianMatrix h = sector_matrix(terms, sector, n_fermions);
  const Eigen::Index dim = h.dim();
  const PauliString& psi = terms[dom].op;
  auto state_of = [&](Eigen::Index col) -> std::uint64_t {
    if (sector == Sector::full) return static_cast<std::uint64_t>(col);
    const std::uint64_t high = static_cast<std::uint64_t>(col) << 1;
    return high | ((std::popcount(high) & 1) ^ (sector == Sector::odd ? 1u : 0u));
  };
  auto index_of = [&](std::uint64_t state) {
    return static_cast<Eigen::Index>(sector == Sector::full ? state : state >> 1);
  };

  // Psi|b> = c_b |b ^ x>; eigenvectors (|b> + eps c_b |b ^ x>) / sqrt(2) with eigenvalue eps.
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const std::uint64_t b = state_of(k);
    const std::complex<double> c = i_power(psi.phase + 2 * (std::popcount(psi.z & b) & 1));
    if (psi.x == 0) {
      u(k, col++) = 1.0;
      continue;
    }
    const std::uint64_t partner = b ^ psi.x;
    if (partner < b) continue;
    const Eigen::Index kp = index_of(partner);
    for (double eps : {1.0, -1.0}) {
      u(k, col) = inv_sqrt2;
      u(kp, col) = eps * c * inv_sqrt2;
      ++col;
    }
  }
  const Eigen::MatrixXcd hp = u.adjoint() * h.to_complex() * u;

  const double cut = options.degeneracy_cut * j1;
  const auto d = static_cast<std::size_t>(dim);
  out.diagonal.resize(d);
  out.radius.assign(d, 0.0);
  for (Eigen::Index i = 0; i < dim; ++i) out.diagonal[static_cast<std::size_t>(i)] = hp(i, i).real();
  auto near_degenerate = [&](Eigen::Index i, Eigen::Index j) {
    const double gap = std::abs(out.diagonal[static_cast<std::size_t>(i)] - out.diagonal[static_cast<std::size_t>(j)]);
    return gap < cut || std::abs(hp(i, j)) > options.max_mixing * gap;
  };

  // Union-find over near-degenerate pairs; singletons reduce to the textbook second-order sum.
  std::vector<std::size_t> parent(d);
  for (std::size_t i = 0; i < d; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const double w = std::abs(hp(i, j));
      out.radius[static_cast<std::size_t>(i)] += w;
      out.radius[static_cast<std::size_t>(j)] += w;
      if (w == 0.0 || !near_degenerate(i, j)) continue;
      ++out.skipped_pairs;
      if (options.quasi_degenerate) parent[find(static_cast<std::size_t>(i))] = find(static_cast<std::size_t>(j));
    }

  std::map<std::size_t, std::vector<Eigen::Index>> clusters;
  for (std::size_t i = 0; i < d; ++i) clusters[find(i)].push_back(static_cast<Eigen::Index>(i));
  std::vector<char> in_cluster(d, 0);
  out.estimates.reserve(d);
  for (const auto& [root, members] : clusters) {
    out.largest_cluster = std::max(out.largest_cluster, members.size());
    for (Eigen::Index a : members) in_cluster[static_cast<std::size_t>(a)] = 1;
    const auto m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXcd eff(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = a; b < m; ++b) {
        const Eigen::Index ia = members[static_cast<std::size_t>(a)], ib = members[static_cast<std::size_t>(b)];
        std::complex<double> value = hp(ia, ib);
        const double ea = out.diagonal[static_cast<std::size_t>(ia)], eb = out.diagonal[static_cast<std::size_t>(ib)];
        for (Eigen::Index k = 0; k < dim; ++k) {
          if (in_cluster[static_cast<std::size_t>(k)] || hp(ia, k) == 0.0 || hp(k, ib) == 0.0) continue;
          if (!options.quasi_degenerate && near_degenerate(ia, k)) continue;
          const double ek = out.diagonal[static_cast<std::size_t>(k)];
          value += 0.5 * hp(ia, k) * hp(k, ib) * (1.0 / (ea - ek) + 1.0 / (eb - ek));
        }
        eff(a, b) = value;
        eff(b, a) = std::conj(value);
      }
    for (Eigen::Index a : members) in_cluster[static_cast<std::size_t>(a)] = 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(eff, Eigen::EigenvaluesOnly);
    for (Eigen::Index a = 0; a < m; ++a) out.estimates.push_back(es.eigenvalues()(a));
  }
  std::sort(out.estimates.begin(), out.estimates.end());
  return out;
}

PerturbativeResult perturbative_spectrum(const CouplingTensor& couplings, Sector sector,
                                         const PerturbativeOptions& options) {
  const int n = couplings.n_fermions, q = couplings.q;
  require(!couplings.values.empty() && couplings.values.size() == binomial(n, q),
          "perturbative_spectrum: coupling tensor has wrong length");
  std::size_t dom = 0;
  for (std::size_t i = 1; i < couplings.values.size(); ++i)
    if (std::abs(couplings.values[i]) > std::abs(couplings.values[dom])) dom = i;
  const std::vector<int> lead = combination_unrank(dom, n, q);

  // relabel[old] = new index; the dominant sites come first, the rest keep their order.
  std::vector<int> relabel(static_cast<std::size_t>(n) + 1, 0);
  int next = 1;
  for (int site : lead) relabel[static_cast<std::size_t>(site)] = next++;
  for (int site = 1; site <= n; ++site)
    if (relabel[static_cast<std::size_t>(site)] == 0) relabel[static_cast<std::size_t>(site)] = next++;
  int inversions = 0;
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) inversions += relabel[static_cast<std::size_t>(a)] > relabel[static_cast<std::size_t>(b)];
  // chi_1 ... chi_N picks up the sign of the relabeling, so odd relabelings swap the parity sectors.
  Sector mapped = sector;
  if (inversions % 2 == 1 && sector != Sector::full) mapped = sector == Sector::even ? Sector::odd : Sector::even;

  std::vector<Term> terms;
  terms.reserve(couplings.values.size());
  std::vector<int> tuple(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) tuple[static_cast<std::size_t>(k)] = k + 1;
  std::vector<int> image(static_cast<std::size_t>(q));
  for (double j : couplings.values) {
    for (int k = 0; k < q; ++k) image[static_cast<std::size_t>(k)] = relabel[static_cast<std::size_t>(tuple[static_cast<std::size_t>(k)])];
    int swaps = 0;
    for (int a = 0; a < q; ++a)
      for (int b = a + 1; b < q; ++b) swaps += image[static_cast<std::size_t>(a)] > image[static_cast<std::size_t>(b)];
    std::sort(image.begin(), image.end());
    terms.push_back({swaps % 2 ? -j : j, majorana_string(image, n)});
    next_combination(tuple, n);
  }
  return perturbative_spectrum(terms, mapped, n, options);
}

std::pair<double, double> two_means(std::vector<double> values) {
  require(values.size() >= 2, "two_means: need at least 2 values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> prefix(n + 1, 0.0), prefix2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + values[i];
    prefix2[i + 1] = prefix2[i] + values[i] * values[i];
  }
  auto sse = [&](std::size_t a, std::size_t b) {
    const double m = static_cast<double>(b - a);
    const double s = prefix[b] - prefix[a];
    return prefix2[b] - prefix2[a] - s * s / m;
  };
  std::size_t best = 1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t split = 1; split < n; ++split) {
    const double cost = sse(0, split) + sse(split, n);
    if (cost < best_cost) {
      best_cost = cost;
      best = split;
    }
  }
  return {prefix[best] / static_cast<double>(best), (prefix[n] - prefix[best]) / static_cast<double>(n - best)};
}

}  // namespace lsyk
