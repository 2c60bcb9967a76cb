#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lsyk/eigensolver.hpp"
#include "lsyk/fit.hpp"
#include "lsyk/spectral.hpp"

namespace lsyk {

inline constexpr double kMainThreshold = 0.10;        // main-text r-deviation threshold
inline constexpr double kSupplementThreshold = 0.01;  // supplement r-deviation threshold

struct TauGridSpec {
  double lo = 1e-4;
  double hi = 10.0;
  std::size_t points = 2000;
};

struct EnsembleSpec {
  std::vector<int> N_list{14, 16, 18, 20, 22};
  std::vector<double> mu_list;  ///< defaults to 0.1, 0.2, ..., 2.0
  int realizations = 200;
  std::uint64_t base_seed = 1;
  int q = 4;
  double J = 1.0;
  double eta = 0.3;
  double r_threshold = kMainThreshold;
  double r_window = 1.0 / 3.0;
  double thouless_threshold = 0.1;
  double close_to_one = 0.9;
  int unfold_degree = 6;
  int unfold_max_degree = 24;
  double unfold_window = 0.9;
  TauGridSpec tau;
  std::size_t smoothing = 100;
  bool compute_sff = true;
  std::filesystem::path output_dir = "lsyk_out";
  std::filesystem::path cache_dir;  ///< empty selects output_dir / "spectra"
  int jobs = 1;

  EnsembleSpec();
  void validate() const;
  std::filesystem::path spectra_dir() const;

  /// Recognized keys: N_list, mu_list, realizations, base_seed, q, J, eta, r_threshold,
  /// r_window, thouless_threshold, close_to_one, unfold_degree, unfold_max_degree, unfold_window, tau_lo, tau_hi,
  /// tau_points, smoothing, compute_sff, output_dir, cache_dir, jobs.
  /// Lists are comma separated or `start:stop:step`; r_threshold also accepts main / supplement.
  static EnsembleSpec from_key_values(const std::map<std::string, std::string>& kv);
};

std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// Seed of realization `index`; shared by every (N, mu) so that sweeps use common random numbers.
std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t index);

/// Sample, build and diagonalize one realization.
Spectrum compute_spectrum(const SykConfig& config);

/// Cached spectrum at `path` if its metadata matches `expected` and its length is `dimension`.
std::optional<Spectrum> load_cached_spectrum(const std::filesystem::path& path, const SpectrumMeta& expected,
                                             std::size_t dimension);

/// Runs f(0), ..., f(n-1) on `jobs` threads; the first exception is rethrown after all threads join.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

struct CellSummary {
  int N = 0;
  double mu = 0.0;
  std::size_t realizations = 0;
  double r_mean = 0.0;
  double r_stderr = 0.0;
  std::size_t zero_spacings = 0;
  double log_avg_emin = 0.0;
  double raw_avg_emin = 0.0;
  std::size_t emin_excluded = 0;
  double a_ratio = 0.0;
  // SFF; NaN when fewer than three realizations unfold cleanly
  std::size_t sff_used = 0;
  std::size_t sff_rejected = 0;  ///< no admissible unfolding degree
  std::size_t degree_raised = 0;
  double tau_th = 0.0;
  double tau_dip = 0.0;
  SffPeak peak;
  // Both fractions count grid points on [tau_dip, 1) and compare smoothed curves.
  double frac_above_rmt = 0.0;        ///< K_c above the reference
  double frac_signif_above_rmt = 0.0; ///< K_c above the reference by more than 3 jackknife errors
  double plateau = 0.0;               ///< mean K_c over tau >= 2
};

struct SweepReport {
  std::size_t computed = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_mismatches = 0;
  std::vector<CellSummary> cells;
};

/// Diagonalizes every missing realization, then regenerates all derived tables under output_dir.
SweepReport run_sweep(const EnsembleSpec& spec, std::ostream* log = nullptr);

/// Fit tables (mu_c.csv, thouless_fit.csv, mu_c2.csv, fit_summary.csv) from r_table.csv and sff_table.csv.
void write_fit_tables(const std::filesystem::path& dir, double r_threshold, double close_to_one);

}  // namespace lsyk
