#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsyk/spectral.hpp"

namespace lsyk {

struct GroundStateStats {
  double log_avg = 0.0;  ///< -exp(<ln |E_min|>)
  double raw_avg = 0.0;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;  ///< realizations with E_min >= 0
  Histogram histogram;         ///< of (E_min - mean) / std over the used realizations
};

GroundStateStats ground_state_stats(std::span<const double> e_min, std::size_t bins = 40);

/// Least-squares slope of the log-averaged E_min against N.
double epsilon_coefficient(std::span<const double> n_values, std::span<const double> log_avg);

/// <g^2> / <g>^2 for the gaps g = E2 - E1.
double a_ratio(std::span<const double> e1, std::span<const double> e2);

double excess_kurtosis(std::span<const double> values);

}  // namespace lsyk
