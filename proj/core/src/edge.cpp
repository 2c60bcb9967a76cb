#include "lsyk/edge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "lsyk/errors.hpp"
#include "lsyk/fit.hpp"

namespace lsyk {

GroundStateStats ground_state_stats(std::span<const double> e_min, std::size_t bins) {
  require(e_min.size() >= 10, "ground_state_stats: need at least 10 realizations");
  GroundStateStats out;
  std::vector<double> used;
  double log_sum = 0.0;
  for (double e : e_min) {
    if (!(e < 0.0)) {
      ++out.n_excluded;
      continue;
    }
    used.push_back(e);
    log_sum += std::log(-e);
  }
  require(!used.empty(), "ground_state_stats: no realization has E_min < 0");
  out.n_used = used.size();
  const double n = static_cast<double>(used.size());
  out.log_avg = -std::exp(log_sum / n);
  out.raw_avg = std::accumulate(used.begin(), used.end(), 0.0) / n;

  double ss = 0.0;
  for (double e : used) ss += (e - out.raw_avg) * (e - out.raw_avg);
  const double sd = std::sqrt(ss / n);
  std::vector<double> scaled(used.size(), 0.0);
  if (sd > 0.0)
    std::transform(used.begin(), used.end(), scaled.begin(), [&](double e) { return (e - out.raw_avg) / sd; });
  std::sort(scaled.begin(), scaled.end());
  const std::vector<std::vector<double>> one{scaled};
  out.histogram = dos_histogram(one, bins, false);
  return out;
}

double epsilon_coefficient(std::span<const double> n_values, std::span<const double> log_avg) {
  require(n_values.size() == log_avg.size(), "epsilon_coefficient: length mismatch");
  require(std::set<double>(n_values.begin(), n_values.end()).size() >= 3, "epsilon_coefficient: need at least 3 distinct N");
  return linear_fit(n_values, log_avg).slope;
}

double a_ratio(std::span<const double> e1, std::span<const double> e2) {
  require(e1.size() == e2.size(), "a_ratio: length mismatch");
  require(e1.size() >= 30, "a_ratio: need at least 30 realizations");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) {
    const double g = e2[i] - e1[i];
    require(g >= 0.0, "a_ratio: E2 must not lie below E1");
    m1 += g;
    m2 += g * g;
  }
  const double n = static_cast<double>(e1.size());
  m1 /= n;
  m2 /= n;
  if (!(m1 > 0.0)) throw NumericalError("a_ratio: mean gap is zero");
  return m2 / (m1 * m1);
}

double excess_kurtosis(std::span<const double> values) {
  require(values.size() >= 4, "excess_kurtosis: need at least 4 values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw NumericalError("excess_kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace lsyk
