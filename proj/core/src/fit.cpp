#include "lsyk/fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lsyk/errors.hpp"
#include "lsyk/spectral.hpp"

namespace lsyk {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "linear_fit: length mismatch");
  require(x.size() >= 2, "linear_fit: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("linear_fit: x values are all equal");
  LinearFit fit;
  fit.n = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      rss += e * e;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

LinearFit power_law_fit(std::span<const double> x, std::span<const double> y, FitMode mode) {
  require(x.size() == y.size(), "power_law_fit: length mismatch");
  require(x.size() >= 3, "power_law_fit: need at least 3 points");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(y[i] > 0.0, "power_law_fit: y must be positive");
    if (mode == FitMode::log_log) require(x[i] > 0.0, "power_law_fit: x must be positive");
    lx[i] = mode == FitMode::log_log ? std::log10(x[i]) : x[i];
    ly[i] = std::log10(y[i]);
  }
  return linear_fit(lx, ly);
}

MuCResult fit_mu_c(const std::vector<RRow>& table, double threshold) {
  require(threshold > 0.0 && threshold < 1.0, "fit_mu_c: threshold must lie in (0, 1)");
  std::map<int, std::vector<std::pair<double, double>>> by_n;
  for (const RRow& row : table) by_n[row.N].emplace_back(row.mu, row.r_mean);
  MuCResult out;
  for (auto& [n, rows] : by_n) {
    std::sort(rows.begin(), rows.end());
    const double r_rmt = rmt_r_value(symmetry_class(n));
    double mu_c = 0.0;
    bool found = false;
    for (const auto& [mu, r] : rows) {
      if (std::abs(r / r_rmt - 1.0) > threshold) {
        mu_c = mu;
        found = true;
      } else {
        break;
      }
    }
    if (found) {
      out.n_values.push_back(n);
      out.mu_c.push_back(mu_c);
    } else {
      out.excluded.push_back(n);
    }
  }
  if (out.n_values.size() >= 3) {
    const std::vector<double> nx(out.n_values.begin(), out.n_values.end());
    out.fit = power_law_fit(nx, out.mu_c, FitMode::log_log);
    out.eta1 = -out.fit.slope;
    out.has_fit = true;
  }
  return out;
}

std::string to_string(Bracket b) {
  switch (b) {
    case Bracket::low: return "low";
    case Bracket::high: return "high";
    default: return "mid";
  }
}

ThoulessScaling fit_thouless_scaling(const std::vector<ThoulessRow>& table, Bracket bracket, double close_to_one) {
  std::map<double, std::vector<std::pair<int, double>>> by_mu;
  std::map<int, std::vector<std::pair<double, double>>> by_n;
  for (const ThoulessRow& row : table) {
    require(row.tau_th > 0.0, "fit_thouless_scaling: tau_Th must be positive");
    by_mu[row.mu].emplace_back(row.N, row.tau_th);
    by_n[row.N].emplace_back(row.mu, row.tau_th);
  }
  ThoulessScaling out;
  for (auto& [mu, rows] : by_mu) {
    std::vector<double> nx, ty;
    std::set<int> distinct;
    for (const auto& [n, t] : rows) {
      nx.push_back(n);
      ty.push_back(t);
      distinct.insert(n);
    }
    if (distinct.size() < 3) continue;
    const LinearFit fit = power_law_fit(nx, ty, FitMode::semi_log);
    out.mu_values.push_back(mu);
    out.alpha_mu.push_back(-fit.slope);
    out.alpha_mu_stderr.push_back(fit.slope_stderr);
  }
  for (auto& [n, rows] : by_n) {
    std::sort(rows.begin(), rows.end());
    std::size_t lo = rows.size();
    for (std::size_t i = 0; i < rows.size() && rows[i].second >= close_to_one; ++i) lo = i;
    if (lo == rows.size() || lo + 1 >= rows.size()) {
      out.excluded.push_back(n);
      continue;
    }
    const double mu_lo = rows[lo].first, mu_hi = rows[lo + 1].first;
    const double value = bracket == Bracket::low ? mu_lo : bracket == Bracket::high ? mu_hi : 0.5 * (mu_lo + mu_hi);
    out.n_values.push_back(n);
    out.mu_c2.push_back(value);
  }
  if (out.n_values.size() >= 3) {
    const std::vector<double> nx(out.n_values.begin(), out.n_values.end());
    out.fit = power_law_fit(nx, out.mu_c2, FitMode::log_log);
    out.eta2 = -out.fit.slope;
    out.has_fit = true;
  }
  return out;
}

PeakScaling fit_peak_scaling(const std::vector<PeakRow>& table) {
  require(table.size() >= 3, "fit_peak_scaling: need peaks at >= 3 sizes");
  std::vector<double> nx, ty;
  for (const PeakRow& row : table) {
    require(std::isfinite(row.tau_star) && row.tau_star > 0.0, "fit_peak_scaling: missing peak");
    nx.push_back(row.N);
    ty.push_back(row.tau_star);
  }
  PeakScaling out;
  out.fit = power_law_fit(nx, ty, FitMode::semi_log);
  out.alpha_star = -out.fit.slope;
  return out;
}

}  // namespace lsyk
