#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsyk/rng.hpp"

namespace lsyk {

/// Symmetric alpha-stable law with characteristic function exp(-|sigma k|^mu).
/// Skewness and shift are fixed at zero.
class StableParams {
 public:
  StableParams(double mu, double sigma);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }

 private:
  double mu_;
  double sigma_;
};

/// Chambers-Mallows-Stuck draw. At mu = 2 this is N(0, 2 sigma^2); at mu = 1 it is
/// Cauchy with scale sigma.
double sample_stable(const StableParams& params, CounterRng& rng);

/// CMS transform of one (V, W) pair at unit scale: V uniform on (-pi/2, pi/2),
/// W standard exponential.
double stable_from_uniforms(double mu, double v, double w);

std::uint64_t binomial(int n, int k);

/// Lexicographic rank of a strictly increasing 1-based tuple among all q-subsets of {1..n}.
std::uint64_t combination_rank(std::span<const int> tuple, int n);
std::vector<int> combination_unrank(std::uint64_t rank, int n, int q);
/// Advances a strictly increasing 1-based tuple to its lexicographic successor.
bool next_combination(std::vector<int>& tuple, int n);

struct CouplingTensor {
  int n_fermions = 0;
  int q = 0;
  double J = 1.0;
  double mu = 2.0;
  std::uint64_t seed = 0;
  std::vector<double> values;  ///< length binomial(n_fermions, q), lexicographic in index tuples

  std::size_t size() const noexcept { return values.size(); }
  double at(std::span<const int> tuple) const;
};

/// sigma = J ((q-1)! / N^(q-1))^(1/mu).
double coupling_scale(int n_fermions, int q, double J, double mu);

CouplingTensor sample_couplings(int n_fermions, int q, double J, double mu, CounterRng& rng);
CouplingTensor sample_couplings(int n_fermions, int q, double J, double mu, std::uint64_t seed);

/// Hill estimator of the tail index from the k largest |samples|.
double tail_index_estimate(std::span<const double> samples, std::size_t k);

}  // namespace lsyk
