#pragma once

#include <span>
#include <vector>

namespace lsyk {

struct SfdPoint {
  double alpha;
  double f;
};

/// Spectrum of fractal dimensions: piecewise-linear f(alpha), -inf outside the support.
///
/// Breakpoints are non-decreasing in alpha. A repeated alpha encodes a vertical jump and
/// the function takes the larger value there. A single breakpoint is a point mass. An
/// Sfd without breakpoints has all its mass at alpha = +inf (an identically zero variable).
class Sfd {
 public:
  Sfd() = default;
  explicit Sfd(std::vector<SfdPoint> points);

  const std::vector<SfdPoint>& points() const noexcept { return points_; }
  bool empty() const noexcept { return points_.empty(); }

  double operator()(double alpha) const;
  double alpha_min() const;
  double alpha_max() const;
  double peak_value() const;
  /// Smallest alpha attaining the peak (the typical magnitude exponent).
  double peak_alpha() const;

 private:
  std::vector<SfdPoint> points_;
};

/// Breakpoint-for-breakpoint comparison.
bool approx_equal(const Sfd& a, const Sfd& b, double tol = 1e-12);
/// max |a - b| over a uniform grid on [lo, hi]; -inf on either side counts as a mismatch of +inf.
double sup_distance(const Sfd& a, const Sfd& b, double lo, double hi, int grid = 2001);

Sfd sfd_levy(double mu);
Sfd sfd_power(const Sfd& f, double n);
Sfd sfd_sum(const Sfd& fx, const Sfd& fy);
Sfd sfd_ratio(const Sfd& fx, const Sfd& fy);
Sfd sfd_extensive_sum(const Sfd& f, double beta);

struct LevelSpacingStages {
  Sfd levy;         ///< single coupling
  Sfd levy_sq;      ///< |j|^2
  Sfd diagonal;     ///< first-order sum of couplings
  Sfd ratio;        ///< |j|^2 / e
  Sfd mixed;        ///< diagonal + same-sector second order
  Sfd extensive;    ///< cross-sector sum of |j|^2
  Sfd energy;       ///< perturbative eigenvalue
  Sfd spacing;      ///< difference of two eigenvalues
};

LevelSpacingStages sfd_level_spacing_stages(double mu, double a, double b, double r = 1.0);
Sfd sfd_level_spacing(double mu, double a, double b, double r = 1.0);

struct EmpiricalSfdOptions {
  int n_bins = 60;
  double trim_fraction = 0.02;  ///< fraction of occupied bins dropped at each end
  double reference_scale = 0.0; ///< magnitude mapped to alpha = 0; 0 selects max |sample|
  double log_base = 0.0;        ///< scaling parameter; 0 selects the sample count
  bool normalize_peak = false;  ///< shift f so that its maximum is 1
};

/// Histogram estimate f(alpha) = 1 + ln(count / (n dalpha ln n)) / ln n with
/// alpha = -ln(|x| / reference) / ln n. Exact zeros sit at alpha = +inf and are dropped.
Sfd sfd_empirical(std::span<const double> samples, const EmpiricalSfdOptions& options = {});

/// mu below which emergent integrability is expected: ln N / ((q c + q) N ln 2).
double crossover_bound(int n_fermions, int q, double c);

}  // namespace lsyk
