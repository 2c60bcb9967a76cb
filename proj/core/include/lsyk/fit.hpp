#pragma once

#include <span>
#include <string>
#include <vector>

#include "lsyk/pauli.hpp"

namespace lsyk {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  ///< 0 with only two points
  std::size_t n = 0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

enum class FitMode {
  log_log,   ///< log10 y against log10 x
  semi_log,  ///< log10 y against x
};

LinearFit power_law_fit(std::span<const double> x, std::span<const double> y, FitMode mode = FitMode::log_log);

struct RRow {
  int N;
  double mu;
  double r_mean;
};

struct MuCResult {
  std::vector<int> n_values;
  std::vector<double> mu_c;
  std::vector<int> excluded;  ///< N without a deviating region
  LinearFit fit;              ///< log-log of mu_c against N
  double eta1 = 0.0;          ///< -slope
  bool has_fit = false;
};

/// mu_c(N): largest grid mu such that |r / r_RMT - 1| > threshold at every grid mu' <= mu.
MuCResult fit_mu_c(const std::vector<RRow>& table, double threshold);

struct ThoulessRow {
  int N;
  double mu;
  double tau_th;
};

enum class Bracket { low, mid, high };
std::string to_string(Bracket b);

struct ThoulessScaling {
  std::vector<double> mu_values;
  std::vector<double> alpha_mu;         ///< -slope of log10 tau_Th against N
  std::vector<double> alpha_mu_stderr;
  std::vector<int> n_values;
  std::vector<double> mu_c2;
  std::vector<int> excluded;
  LinearFit fit;
  double eta2 = 0.0;
  bool has_fit = false;
};

/// mu_{c,2}(N) from the grid bracket where tau_Th leaves the plateau value: tau_Th >= close_to_one
/// holds at every grid mu' <= mu_lo and fails at the next grid point mu_hi.
ThoulessScaling fit_thouless_scaling(const std::vector<ThoulessRow>& table, Bracket bracket = Bracket::mid,
                                     double close_to_one = 0.9);

struct PeakRow {
  int N;
  double tau_star;
};

struct PeakScaling {
  double alpha_star = 0.0;
  LinearFit fit;
};

PeakScaling fit_peak_scaling(const std::vector<PeakRow>& table);

}  // namespace lsyk
