#include "lsyk/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lsyk/errors.hpp"

namespace lsyk {

StableParams::StableParams(double mu, double sigma) : mu_(mu), sigma_(sigma) {
  require(mu > 0.0 && mu <= 2.0, "stable law: mu must lie in (0, 2], got " + std::to_string(mu));
  require(sigma > 0.0 && std::isfinite(sigma),
          "stable law: sigma must be positive, got " + std::to_string(sigma));
}

double stable_from_uniforms(double mu, double v, double w) {
  if (mu == 1.0) return std::tan(v);
  // Log-space evaluation keeps small-mu draws finite: 1/mu can be large.
  const double s = std::sin(mu * v);
  if (s == 0.0) return 0.0;
  const double log_mag = std::log(std::abs(s)) - std::log(std::cos(v)) / mu +
                         (1.0 - mu) / mu * (std::log(std::cos((1.0 - mu) * v)) - std::log(w));
  return std::copysign(std::exp(log_mag), s);
}

double sample_stable(const StableParams& params, CounterRng& rng) {
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  return params.sigma() * stable_from_uniforms(params.mu(), v, w);
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * static_cast<std::uint64_t>(n - k + i) / i;
  return result;
}

std::uint64_t combination_rank(std::span<const int> tuple, int n) {
  const int q = static_cast<int>(tuple.size());
  std::uint64_t rank = 0;
  int prev = 0;
  for (int pos = 0; pos < q; ++pos) {
    const int value = tuple[pos];
    require(value > prev && value <= n, "combination_rank: tuple must be strictly increasing in [1, n]");
    for (int skipped = prev + 1; skipped < value; ++skipped) rank += binomial(n - skipped, q - pos - 1);
    prev = value;
  }
  return rank;
}

std::vector<int> combination_unrank(std::uint64_t rank, int n, int q) {
  require(rank < binomial(n, q), "combination_unrank: rank out of range");
  std::vector<int> tuple;
  tuple.reserve(q);
  int candidate = 1;
  for (int pos = 0; pos < q; ++pos) {
    while (true) {
      const std::uint64_t block = binomial(n - candidate, q - pos - 1);
      if (rank < block) break;
      rank -= block;
      ++candidate;
    }
    tuple.push_back(candidate++);
  }
  return tuple;
}

bool next_combination(std::vector<int>& tuple, int n) {
  const int q = static_cast<int>(tuple.size());
  for (int pos = q - 1; pos >= 0; --pos) {
    if (tuple[pos] < n - (q - 1 - pos)) {
      ++tuple[pos];
      for (int later = pos + 1; later < q; ++later) tuple[later] = tuple[later - 1] + 1;
      return true;
    }
  }
  return false;
}

double CouplingTensor::at(std::span<const int> tuple) const {
  require(static_cast<int>(tuple.size()) == q, "CouplingTensor::at: tuple length must equal q");
  return values.at(combination_rank(tuple, n_fermions));
}

double coupling_scale(int n_fermions, int q, double J, double mu) {
  const double log_ratio = std::lgamma(static_cast<double>(q)) - (q - 1) * std::log(static_cast<double>(n_fermions));
  return J * std::exp(log_ratio / mu);
}

namespace {

void validate_coupling_args(int n_fermions, int q, double J, double mu) {
  require(n_fermions >= 2 && n_fermions % 2 == 0, "couplings: N must be even and >= 2");
  require(q >= 2 && q % 2 == 0 && q <= n_fermions, "couplings: q must be even with 2 <= q <= N");
  require(mu > 0.0 && mu <= 2.0, "couplings: mu must lie in (0, 2]");
  require(J > 0.0, "couplings: J must be positive");
  require(n_fermions <= 64, "couplings: N > 64 is not supported");
}

}  // namespace

CouplingTensor sample_couplings(int n_fermions, int q, double J, double mu, CounterRng& rng) {
  validate_coupling_args(n_fermions, q, J, mu);
  const StableParams params(mu, coupling_scale(n_fermions, q, J, mu));
  CouplingTensor tensor{n_fermions, q, J, mu, rng.seed(), {}};
  tensor.values.resize(binomial(n_fermions, q));
  for (double& value : tensor.values) value = sample_stable(params, rng);
  return tensor;
}

CouplingTensor sample_couplings(int n_fermions, int q, double J, double mu, std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_couplings(n_fermions, q, J, mu, rng);
}

double tail_index_estimate(std::span<const double> samples, std::size_t k) {
  const std::size_t n = samples.size();
  require(n > 0, "tail_index_estimate: empty sample");
  require(k > 0 && k < n, "tail_index_estimate: need 0 < k < n");
  std::vector<double> mags(n);
  std::transform(samples.begin(), samples.end(), mags.begin(), [](double x) { return std::abs(x); });
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end(), std::greater<>());
  const double threshold = mags[k];
  require(threshold > 0.0, "tail_index_estimate: (k+1)-th largest magnitude is zero");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(mags[i] / threshold);
  if (!(sum > 0.0)) throw NumericalError("tail_index_estimate: degenerate sample (no spread in the tail)");
  return static_cast<double>(k) / sum;
}

}  // namespace lsyk
