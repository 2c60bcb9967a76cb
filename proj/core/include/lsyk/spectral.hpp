#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lsyk/eigensolver.hpp"

namespace lsyk {

inline constexpr double kPoissonR = 0.38629436111989061;  // 2 ln 2 - 1

double rmt_r_value(SymmetryClass cls);

struct RStatistic {
  double mean = 0.0;
  std::size_t n_ratios = 0;
  std::size_t zero_spacings = 0;  ///< exact degeneracies excluded from the average
};

/// Mean of min(s_n / s_{n-1}, s_{n-1} / s_n) over the middle `window` fraction of the levels.
RStatistic r_statistic(std::span<const double> eigenvalues, double window = 1.0 / 3.0);
/// As above; GSE spectra must be Kramers-deduplicated first.
double r_statistics(const Spectrum& spectrum, double window = 1.0 / 3.0);

struct EnsembleStats {
  std::vector<double> r_values;
  double mean_r = 0.0;
  double stderr_r = 0.0;
  double window = 1.0 / 3.0;
};

EnsembleStats summarize_r(std::vector<double> r_values, double window = 1.0 / 3.0);

struct UnfoldedSpectrum {
  std::vector<double> energies;  ///< raw levels inside the fit window
  std::vector<double> unfolded;  ///< fitted staircase at those levels
  double raw_mean = 0.0;         ///< over the whole spectrum
  double raw_std = 0.0;
  double mean_spacing = 0.0;     ///< of the unfolded window
  bool monotone = true;
  int degree = 0;
};

/// Least-squares polynomial fit of the staircase on the middle `window` fraction of levels.
UnfoldedSpectrum unfold(std::span<const double> eigenvalues, int degree = 6, double window = 0.9);

struct UnfoldOptions {
  int degree = 6;       ///< first degree tried
  int max_degree = 24;  ///< also capped at a quarter of the levels in the window
  double window = 0.9;
  double tolerance = 0.02;  ///< on the unfolded mean spacing
};

/// Raises the degree in steps of 2 until the fit is monotone at the levels with mean spacing within
/// tolerance of 1. A degree near the level count absorbs genuine fluctuations, hence the cap.
/// nullopt when no admissible degree qualifies.
std::optional<UnfoldedSpectrum> unfold_adaptive(std::span<const double> eigenvalues, const UnfoldOptions& options = {});

std::vector<double> log_tau_grid(double lo = 1e-4, double hi = 10.0, std::size_t points = 2000);
std::vector<double> rmt_sff_reference(SymmetryClass cls, std::span<const double> tau);

struct SffCurve {
  std::vector<double> tau;
  std::vector<double> k_full;
  std::vector<double> k_disconnected;
  std::vector<double> k_connected;
  std::vector<double> k_rmt;
  double eta = 0.3;
  SymmetryClass cls = SymmetryClass::GUE;
  std::size_t n_realizations = 0;
  std::size_t n_rejected = 0;         ///< non-monotone unfoldings left out
  std::size_t negative_connected = 0; ///< grid points with K_c < -1e-6

  // Filled when sff() is given a smoothing window.
  std::size_t smoothing = 0;
  std::vector<double> k_connected_smooth;
  std::vector<double> k_connected_smooth_stderr;  ///< leave-one-realization-out jackknife
  std::vector<double> k_rmt_smooth;               ///< reference under the same moving average
};

/// Gaussian-filtered SFF, normalized so that the plateau is 1. A nonzero smoothing window also
/// produces the smoothed curves; the jackknife needs at least 3 realizations.
SffCurve sff(std::span<const UnfoldedSpectrum> ensemble, double eta, std::span<const double> tau, SymmetryClass cls,
             std::size_t smoothing = 0);

/// First grid tau where the disconnected part no longer exceeds the connected part.
double sff_dip(const SffCurve& curve);

/// Centered mean over `window` points, truncated at the ends.
std::vector<double> moving_average(std::span<const double> values, std::size_t window = 100);

/// Smallest grid tau with |log10(K / K_ref)| <= threshold on all grid points of [tau, min(2 tau, 1)];
/// 1 when no such tau precedes the plateau.
double thouless_time(std::span<const double> tau, std::span<const double> k, std::span<const double> k_ref,
                     double threshold = 0.1);

struct SffPeak {
  bool found = false;  ///< the highest local maximum lies above the reference
  double tau_star = std::numeric_limits<double>::quiet_NaN();
  double k_peak = std::numeric_limits<double>::quiet_NaN();
  double k_ref = std::numeric_limits<double>::quiet_NaN();
};

/// Highest interior local maximum of K on (tau_dip, tau_limit].
SffPeak sff_peak(std::span<const double> tau, std::span<const double> k, std::span<const double> k_ref, double tau_dip,
                 double tau_limit);

struct Histogram {
  std::vector<double> edges;    ///< bins + 1 ascending edges
  std::vector<double> density;  ///< integrates to 1
  std::vector<double> reference;  ///< optional analytic reference at bin centers
};

Histogram dos_histogram(std::span<const std::vector<double>> spectra, std::size_t bins, bool rescale);
double wigner_surmise(SymmetryClass cls, double s);
Histogram spacing_distribution(std::span<const UnfoldedSpectrum> ensemble, std::size_t bins, SymmetryClass cls);

}  // namespace lsyk
