#include "lsyk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "lsyk/errors.hpp"

namespace lsyk {

double rmt_r_value(SymmetryClass cls) {
  switch (cls) {
    case SymmetryClass::GOE: return 0.5307;
    case SymmetryClass::GUE: return 0.5996;
    default: return 0.6744;
  }
}

RStatistic r_statistic(std::span<const double> eigenvalues, double window) {
  require(window > 0.0 && window <= 1.0, "r_statistic: window must lie in (0, 1]");
  const std::size_t n = eigenvalues.size();
  const auto skip = static_cast<std::size_t>(std::floor(0.5 * (1.0 - window) * static_cast<double>(n)));
  const std::size_t first = skip;
  const std::size_t last = n - skip;  // exclusive
  require(last > first && last - first >= 10, "r_statistic: need at least 10 levels in the window");
  RStatistic out;
  double sum = 0.0;
  for (std::size_t i = first + 2; i < last; ++i) {
    const double s_prev = eigenvalues[i - 1] - eigenvalues[i - 2];
    const double s_next = eigenvalues[i] - eigenvalues[i - 1];
    if (s_prev <= 0.0 || s_next <= 0.0) {
      ++out.zero_spacings;
      continue;
    }
    sum += std::min(s_prev, s_next) / std::max(s_prev, s_next);
    ++out.n_ratios;
  }
  if (out.n_ratios == 0) throw NumericalError("r_statistic: every spacing in the window is degenerate");
  out.mean = sum / static_cast<double>(out.n_ratios);
  return out;
}

double r_statistics(const Spectrum& spectrum, double window) {
  require(spectrum.meta.symmetry != SymmetryClass::GSE || spectrum.meta.kramers_deduped ||
              spectrum.meta.deformation != Deformation::none,
          "r_statistics: deduplicate Kramers pairs of GSE spectra first");
  return r_statistic(spectrum.eigenvalues, window).mean;
}

EnsembleStats summarize_r(std::vector<double> r_values, double window) {
  EnsembleStats stats;
  stats.window = window;
  stats.r_values = std::move(r_values);
  std::vector<double> finite;
  for (double r : stats.r_values)
    if (std::isfinite(r)) finite.push_back(r);
  require(!finite.empty(), "summarize_r: no finite r values");
  const double n = static_cast<double>(finite.size());
  stats.mean_r = std::accumulate(finite.begin(), finite.end(), 0.0) / n;
  if (finite.size() > 1) {
    double ss = 0.0;
    for (double r : finite) ss += (r - stats.mean_r) * (r - stats.mean_r);
    stats.stderr_r = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return stats;
}

UnfoldedSpectrum unfold(std::span<const double> eigenvalues, int degree, double window) {
  require(degree >= 1, "unfold: degree must be >= 1");
  require(window > 0.0 && window <= 1.0, "unfold: window must lie in (0, 1]");
  const std::size_t n = eigenvalues.size();
  const auto skip = static_cast<std::size_t>(std::floor(0.5 * (1.0 - window) * static_cast<double>(n)));
  const std::size_t first = skip;
  const std::size_t count = n - 2 * skip;
  require(count >= static_cast<std::size_t>(degree) + 2, "unfold: need at least degree + 2 levels in the window");

  UnfoldedSpectrum out;
  const double mean = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double e : eigenvalues) ss += (e - mean) * (e - mean);
  out.raw_mean = mean;
  out.raw_std = std::sqrt(ss / static_cast<double>(n));

  out.energies.assign(eigenvalues.begin() + static_cast<std::ptrdiff_t>(first),
                      eigenvalues.begin() + static_cast<std::ptrdiff_t>(first + count));
  const double lo = out.energies.front(), hi = out.energies.back();
  const double center = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  if (!(half > 0.0)) throw NumericalError("unfold: window has zero width");

  // Chebyshev basis on [-1, 1]; same fit as monomials, conditioned for high degree
  const auto rows = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd basis(rows, degree + 1);
  Eigen::VectorXd staircase(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double x = (out.energies[static_cast<std::size_t>(i)] - center) / half;
    basis(i, 0) = 1.0;
    if (degree >= 1) basis(i, 1) = x;
    for (int d = 2; d <= degree; ++d) basis(i, d) = 2.0 * x * basis(i, d - 1) - basis(i, d - 2);
    staircase(i) = static_cast<double>(first + static_cast<std::size_t>(i)) + 0.5;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  if (qr.rank() < degree + 1)
    throw NumericalError("unfold: staircase fit is rank deficient at degree " + std::to_string(degree) + "; use a lower degree");
  const Eigen::VectorXd fitted = basis * qr.solve(staircase);

  out.degree = degree;
  out.unfolded.assign(fitted.data(), fitted.data() + count);
  for (std::size_t i = 1; i < count; ++i)
    if (out.unfolded[i] < out.unfolded[i - 1]) out.monotone = false;
  out.mean_spacing = (out.unfolded.back() - out.unfolded.front()) / static_cast<double>(count - 1);
  return out;
}

std::optional<UnfoldedSpectrum> unfold_adaptive(std::span<const double> eigenvalues, const UnfoldOptions& options) {
  require(options.degree >= 1 && options.max_degree >= options.degree, "unfold_adaptive: need 1 <= degree <= max_degree");
  require(options.tolerance > 0.0, "unfold_adaptive: tolerance must be positive");
  require(options.window > 0.0 && options.window <= 1.0, "unfold_adaptive: window must lie in (0, 1]");
  const std::size_t n = eigenvalues.size();
  const auto skip = static_cast<std::size_t>(std::floor(0.5 * (1.0 - options.window) * static_cast<double>(n)));
  const int cap = std::max(options.degree, std::min(options.max_degree, static_cast<int>((n - 2 * skip) / 4)));
  for (int d = options.degree; d <= cap; d += 2) {
    try {
      UnfoldedSpectrum u = unfold(eigenvalues, d, options.window);
      if (u.monotone && std::abs(u.mean_spacing - 1.0) <= options.tolerance) return u;
    } catch (const NumericalError&) {
    }
  }
  return std::nullopt;
}

std::vector<double> log_tau_grid(double lo, double hi, std::size_t points) {
  require(lo > 0.0 && hi > lo && points >= 2, "log_tau_grid: need 0 < lo < hi and >= 2 points");
  std::vector<double> tau(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) tau[i] = lo * std::exp(step * static_cast<double>(i));
  tau.back() = hi;
  return tau;
}

std::vector<double> rmt_sff_reference(SymmetryClass cls, std::span<const double> tau) {
  std::vector<double> out(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double t = tau[i];
    switch (cls) {
      case SymmetryClass::GUE: out[i] = t <= 1.0 ? t : 1.0; break;
      case SymmetryClass::GOE:
        out[i] = t <= 1.0 ? 2.0 * t - t * std::log1p(2.0 * t) : 2.0 - t * std::log((2.0 * t + 1.0) / (2.0 * t - 1.0));
        break;
      case SymmetryClass::GSE:
        out[i] = t <= 2.0 ? 0.5 * t - 0.25 * t * std::log(std::abs(1.0 - t)) : 1.0;
        if (t == 1.0) out[i] = std::numeric_limits<double>::infinity();
        break;
    }
  }
  return out;
}

SffCurve sff(std::span<const UnfoldedSpectrum> ensemble, double eta, std::span<const double> tau, SymmetryClass cls,
             std::size_t smoothing) {
  require(eta > 0.0, "sff: eta must be positive");
  require(!tau.empty(), "sff: empty tau grid");
  const std::size_t nt = tau.size();
  SffCurve curve;
  curve.tau.assign(tau.begin(), tau.end());
  curve.eta = eta;
  curve.cls = cls;

  std::vector<double> sum_abs2(nt, 0.0);
  std::vector<std::complex<double>> sum_z(nt, {0.0, 0.0});
  double sum_f2 = 0.0;
  std::vector<double> weight, phase;
  std::vector<std::complex<double>> z_all;  // realization-major, kept for the jackknife
  std::vector<double> f2_all;
  for (const UnfoldedSpectrum& u : ensemble) {
    if (!u.monotone) {
      ++curve.n_rejected;
      continue;
    }
    require(u.raw_std > 0.0, "sff: realization with zero spectral width");
    const double width = eta * u.raw_std;
    const std::size_t nl = u.energies.size();
    weight.resize(nl);
    phase.resize(nl);
    double f2 = 0.0;
    for (std::size_t n = 0; n < nl; ++n) {
      const double d = (u.energies[n] - u.raw_mean) / width;
      weight[n] = std::exp(-0.5 * d * d);
      phase[n] = 2.0 * std::numbers::pi * u.unfolded[n];
      f2 += weight[n] * weight[n];
    }
    sum_f2 += f2;
    if (smoothing > 0) f2_all.push_back(f2);
    for (std::size_t t = 0; t < nt; ++t) {
      double re = 0.0, im = 0.0;
      for (std::size_t n = 0; n < nl; ++n) {
        const double arg = phase[n] * tau[t];
        re += weight[n] * std::cos(arg);
        im -= weight[n] * std::sin(arg);
      }
      sum_abs2[t] += re * re + im * im;
      sum_z[t] += std::complex<double>(re, im);
      if (smoothing > 0) z_all.emplace_back(re, im);
    }
    ++curve.n_realizations;
  }
  if (curve.n_realizations < 2)
    throw ParameterError("sff: need at least 2 accepted realizations for the disconnected part");

  const double r = static_cast<double>(curve.n_realizations);
  const double norm = sum_f2 / r;
  curve.k_full.resize(nt);
  curve.k_disconnected.resize(nt);
  curve.k_connected.resize(nt);
  // Unbiased ensemble variance of Z: |<Z>|^2 alone overshoots the disconnected part by <|Z|^2>/R.
  for (std::size_t t = 0; t < nt; ++t) {
    curve.k_full[t] = sum_abs2[t] / r / norm;
    curve.k_connected[t] = r / (r - 1.0) * (curve.k_full[t] - std::norm(sum_z[t] / r) / norm);
    curve.k_disconnected[t] = curve.k_full[t] - curve.k_connected[t];
    if (curve.k_connected[t] < -1e-6) ++curve.negative_connected;
  }
  curve.k_rmt = rmt_sff_reference(cls, tau);
  if (smoothing == 0) return curve;

  curve.smoothing = smoothing;
  curve.k_connected_smooth = moving_average(curve.k_connected, smoothing);
  curve.k_rmt_smooth = moving_average(curve.k_rmt, smoothing);
  curve.k_connected_smooth_stderr.assign(nt, std::numeric_limits<double>::quiet_NaN());
  const std::size_t nr = curve.n_realizations;
  if (nr < 3) return curve;
  const double m = r - 1.0;
  std::vector<double> loo(nt), mean(nt, 0.0), sq(nt, 0.0);
  for (std::size_t j = 0; j < nr; ++j) {
    const double norm_j = (sum_f2 - f2_all[j]) / m;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::complex<double> z = z_all[j * nt + t];
      const double full = (sum_abs2[t] - std::norm(z)) / m / norm_j;
      loo[t] = m / (m - 1.0) * (full - std::norm((sum_z[t] - z) / m) / norm_j);
    }
    const std::vector<double> s = moving_average(loo, smoothing);
    for (std::size_t t = 0; t < nt; ++t) {
      mean[t] += s[t];
      sq[t] += s[t] * s[t];
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    const double mu = mean[t] / r;
    const double var = std::max(0.0, sq[t] / r - mu * mu);
    curve.k_connected_smooth_stderr[t] = std::sqrt(m * var);
  }
  return curve;
}

double sff_dip(const SffCurve& curve) {
  require(!curve.tau.empty(), "sff_dip: empty curve");
  for (std::size_t t = 0; t < curve.tau.size(); ++t)
    if (curve.k_disconnected[t] <= curve.k_connected[t]) return curve.tau[t];
  return curve.tau.back();
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  require(window >= 1, "moving_average: window must be >= 1");
  const std::size_t n = values.size();
  require(window <= std::max<std::size_t>(n, 1), "moving_average: window exceeds curve length");
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= left ? i - left : 0;
    const std::size_t b = std::min(n, i + right + 1);
    out[i] = (prefix[b] - prefix[a]) / static_cast<double>(b - a);
  }
  return out;
}

double thouless_time(std::span<const double> tau, std::span<const double> k, std::span<const double> k_ref,
                     double threshold) {
  require(!tau.empty(), "thouless_time: empty curve");
  require(tau.size() == k.size() && tau.size() == k_ref.size(), "thouless_time: length mismatch");
  const std::size_t n = tau.size();
  std::vector<bool> within(n);
  for (std::size_t i = 0; i < n; ++i) {
    within[i] = k[i] > 0.0 && k_ref[i] > 0.0 && std::isfinite(k_ref[i]) &&
                std::abs(std::log10(k[i] / k_ref[i])) <= threshold;
  }
  // bad_after[i]: first index >= i that is not within threshold.
  std::vector<std::size_t> next_bad(n + 1, n);
  for (std::size_t i = n; i-- > 0;) next_bad[i] = within[i] ? next_bad[i + 1] : i;
  for (std::size_t i = 0; i < n && tau[i] < 1.0; ++i) {
    if (!within[i]) continue;
    const double end = std::min(2.0 * tau[i], 1.0);
    const std::size_t bad = next_bad[i];
    if (bad == n || tau[bad] > end) return tau[i];
  }
  return 1.0;
}

SffPeak sff_peak(std::span<const double> tau, std::span<const double> k, std::span<const double> k_ref, double tau_dip,
                 double tau_limit) {
  require(tau.size() == k.size() && tau.size() == k_ref.size(), "sff_peak: length mismatch");
  SffPeak peak;
  bool any = false;
  for (std::size_t i = 1; i + 1 < tau.size() && tau[i] <= tau_limit; ++i) {
    if (tau[i] <= tau_dip || !(k[i] >= k[i - 1] && k[i] > k[i + 1])) continue;
    if (!any || k[i] > peak.k_peak) {
      any = true;
      peak.tau_star = tau[i];
      peak.k_peak = k[i];
      peak.k_ref = k_ref[i];
    }
  }
  peak.found = any && peak.k_peak > peak.k_ref;
  return peak;
}

Histogram dos_histogram(std::span<const std::vector<double>> spectra, std::size_t bins, bool rescale) {
  require(!spectra.empty(), "dos_histogram: no spectra");
  require(bins >= 1, "dos_histogram: need at least one bin");
  double lo = -0.5, hi = 0.5;
  if (!rescale) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& s : spectra) {
      require(!s.empty(), "dos_histogram: empty spectrum");
      lo = std::min(lo, s.front());
      hi = std::max(hi, s.back());
    }
    if (!(hi > lo)) hi = lo + 1.0;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.density.assign(bins, 0.0);
  for (const auto& s : spectra) {
    require(!s.empty(), "dos_histogram: empty spectrum");
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    const double span = *mx - *mn;
    for (double e : s) {
      double x = e;
      if (rescale) x = span > 0.0 ? (e - *mn) / span - 0.5 : 0.0;
      const auto bin = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, (x - lo) / width)));
      h.density[bin] += 1.0 / (static_cast<double>(s.size()) * width);
    }
  }
  for (double& d : h.density) d /= static_cast<double>(spectra.size());
  return h;
}

double wigner_surmise(SymmetryClass cls, double s) {
  constexpr double pi = std::numbers::pi;
  switch (cls) {
    case SymmetryClass::GOE: return 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
    case SymmetryClass::GUE: return 32.0 / (pi * pi) * s * s * std::exp(-4.0 * s * s / pi);
    default:
      return std::pow(2.0, 18) / (std::pow(3.0, 6) * pi * pi * pi) * std::pow(s, 4) * std::exp(-64.0 * s * s / (9.0 * pi));
  }
}

Histogram spacing_distribution(std::span<const UnfoldedSpectrum> ensemble, std::size_t bins, SymmetryClass cls) {
  require(bins >= 1, "spacing_distribution: need at least one bin");
  std::vector<double> spacings;
  for (const auto& u : ensemble)
    for (std::size_t i = 1; i < u.unfolded.size(); ++i) spacings.push_back(u.unfolded[i] - u.unfolded[i - 1]);
  require(!spacings.empty(), "spacing_distribution: no spacings");
  const double hi = std::max(*std::max_element(spacings.begin(), spacings.end()), 1e-12);
  const double width = hi / static_cast<double>(bins);
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = width * static_cast<double>(i);
  h.density.assign(bins, 0.0);
  const double unit = 1.0 / (static_cast<double>(spacings.size()) * width);
  for (double s : spacings) h.density[std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, s / width)))] += unit;
  h.reference.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) h.reference[i] = wigner_surmise(cls, (static_cast<double>(i) + 0.5) * width);
  return h;
}

}  // namespace lsyk
