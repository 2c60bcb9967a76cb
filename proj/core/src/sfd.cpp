#include "lsyk/sfd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lsyk/errors.hpp"

namespace lsyk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-12;

bool close(double x, double y) { return std::abs(x - y) <= kTol * (1.0 + std::abs(x) + std::abs(y)); }

/// Linear function on the closed interval [a0, a1]; a0 == a1 is a single point.
struct Piece {
  double a0, a1, f0, f1;

  double slope() const { return a1 > a0 ? (f1 - f0) / (a1 - a0) : 0.0; }
  double at(double alpha) const { return a1 > a0 ? f0 + slope() * (alpha - a0) : f0; }
  bool covers(double alpha) const { return alpha >= a0 - kTol * (1.0 + std::abs(a0)) &&
                                           alpha <= a1 + kTol * (1.0 + std::abs(a1)); }
};

std::vector<Piece> pieces_of(const Sfd& sfd) {
  const auto& pts = sfd.points();
  std::vector<Piece> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.push_back({pts[i].alpha, pts[i].alpha, pts[i].f, pts[i].f});
    if (i + 1 < pts.size() && pts[i + 1].alpha > pts[i].alpha)
      out.push_back({pts[i].alpha, pts[i + 1].alpha, pts[i].f, pts[i + 1].f});
  }
  return out;
}

/// Restriction to [lo, hi] (either bound may be infinite).
std::vector<Piece> restrict(const std::vector<Piece>& pieces, double lo, double hi) {
  std::vector<Piece> out;
  for (const Piece& p : pieces) {
    const double a0 = std::max(p.a0, lo);
    const double a1 = std::min(p.a1, hi);
    if (a0 > a1) continue;
    out.push_back({a0, a1, p.at(a0), p.at(a1)});
  }
  return out;
}

/// Keeps the part of every piece with f >= 0.
std::vector<Piece> clip_nonnegative(const std::vector<Piece>& pieces) {
  std::vector<Piece> out;
  for (const Piece& p : pieces) {
    const bool keep0 = p.f0 >= -kTol;
    const bool keep1 = p.f1 >= -kTol;
    if (keep0 && keep1) {
      out.push_back({p.a0, p.a1, std::max(p.f0, 0.0), std::max(p.f1, 0.0)});
    } else if (keep0 || keep1) {
      const double cross = p.a0 + (0.0 - p.f0) / p.slope();
      if (keep0) out.push_back({p.a0, cross, p.f0, 0.0});
      else out.push_back({cross, p.a1, 0.0, p.f1});
    }
  }
  return out;
}

void simplify(std::vector<SfdPoint>& pts) {
  std::vector<SfdPoint> out;
  for (const SfdPoint& p : pts) {
    if (!out.empty() && close(out.back().alpha, p.alpha) && close(out.back().f, p.f)) continue;
    if (out.size() >= 2) {
      const SfdPoint& a = out[out.size() - 2];
      const SfdPoint& b = out.back();
      if (a.alpha < b.alpha && b.alpha < p.alpha) {
        const double predicted = a.f + (b.f - a.f) * (p.alpha - a.alpha) / (b.alpha - a.alpha);
        if (close(predicted, p.f)) out.pop_back();
      }
    }
    out.push_back(p);
  }
  pts = std::move(out);
}

/// Upper envelope of a set of pieces. The union of their domains must be an interval.
Sfd envelope(const std::vector<Piece>& pieces) {
  if (pieces.empty()) return Sfd();
  std::vector<double> cuts;
  for (const Piece& p : pieces) {
    cuts.push_back(p.a0);
    cuts.push_back(p.a1);
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      const Piece& p = pieces[i];
      const Piece& q = pieces[j];
      const double lo = std::max(p.a0, q.a0);
      const double hi = std::min(p.a1, q.a1);
      if (!(lo < hi) || p.a0 == p.a1 || q.a0 == q.a1) continue;
      const double ds = p.slope() - q.slope();
      if (ds == 0.0) continue;
      const double x = lo + (q.at(lo) - p.at(lo)) / ds;
      if (x > lo && x < hi) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> grid;
  for (double c : cuts)
    if (grid.empty() || !close(grid.back(), c)) grid.push_back(c);

  std::vector<SfdPoint> pts;
  bool has_incoming = false;
  double incoming = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double c = grid[k];
    double value = kNegInf;
    for (const Piece& p : pieces)
      if (p.covers(c)) value = std::max(value, p.at(c));

    const Piece* next = nullptr;
    if (k + 1 < grid.size()) {
      const double c1 = grid[k + 1];
      const double mid = 0.5 * (c + c1);
      for (const Piece& p : pieces)
        if (p.a1 > p.a0 && p.covers(c) && p.covers(c1) && (!next || p.at(mid) > next->at(mid))) next = &p;
      if (!next) throw NumericalError("sfd: fusion produced a disconnected support");
    }

    if (has_incoming && incoming < value && !close(incoming, value)) pts.push_back({c, incoming});
    pts.push_back({c, value});
    if (next) {
      const double outgoing = next->at(c);
      if (outgoing < value && !close(outgoing, value)) pts.push_back({c, outgoing});
      has_incoming = true;
      incoming = next->at(grid[k + 1]);
    }
  }
  simplify(pts);
  return Sfd(std::move(pts));
}

/// Envelope of pieces after dropping alpha < 0 and f < 0.
Sfd finish(const std::vector<Piece>& pieces) {
  return envelope(clip_nonnegative(restrict(pieces, 0.0, std::numeric_limits<double>::infinity())));
}

/// Pointwise sum fx + fy + alpha on the common support.
std::vector<Piece> saddle_integrand(const std::vector<Piece>& px, const std::vector<Piece>& py) {
  std::vector<Piece> out;
  for (const Piece& p : px) {
    for (const Piece& q : py) {
      const double a0 = std::max(p.a0, q.a0);
      const double a1 = std::min(p.a1, q.a1);
      if (a0 > a1) continue;
      out.push_back({a0, a1, p.at(a0) + q.at(a0) + a0, p.at(a1) + q.at(a1) + a1});
    }
  }
  return out;
}

/// S(alpha) = max_{xi <= alpha} g(xi), continued as a constant up to extend_to.
std::vector<Piece> running_max(const Sfd& g, double extend_to) {
  std::vector<Piece> out;
  const auto& pts = g.points();
  if (pts.empty()) return out;
  double m = pts.front().f;
  out.push_back({pts.front().alpha, pts.front().alpha, m, m});
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i].alpha, b = pts[i + 1].alpha;
    const double fa = pts[i].f, fb = pts[i + 1].f;
    if (a == b) {
      m = std::max(m, fb);
      out.push_back({b, b, m, m});
    } else if (fb > fa && fb > m) {
      if (fa >= m) {
        out.push_back({a, b, fa, fb});
      } else {
        const double c = a + (m - fa) / (fb - fa) * (b - a);
        out.push_back({a, c, m, m});
        out.push_back({c, b, m, fb});
      }
      m = fb;
    } else {
      m = std::max(m, fa);
      out.push_back({a, b, m, m});
    }
  }
  const double last = pts.back().alpha;
  if (extend_to > last) out.push_back({last, extend_to, m, m});
  return out;
}

}  // namespace

Sfd::Sfd(std::vector<SfdPoint> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(std::isfinite(points_[i].alpha) && std::isfinite(points_[i].f), "Sfd: breakpoints must be finite");
    if (i > 0) require(points_[i].alpha >= points_[i - 1].alpha, "Sfd: breakpoints must be ordered in alpha");
  }
}

double Sfd::operator()(double alpha) const {
  double best = kNegInf;
  for (const Piece& p : pieces_of(*this))
    if (alpha >= p.a0 && alpha <= p.a1) best = std::max(best, p.at(alpha));
  return best;
}

double Sfd::alpha_min() const {
  require(!empty(), "Sfd: empty support");
  return points_.front().alpha;
}

double Sfd::alpha_max() const {
  require(!empty(), "Sfd: empty support");
  return points_.back().alpha;
}

double Sfd::peak_value() const {
  require(!empty(), "Sfd: empty support");
  double best = kNegInf;
  for (const SfdPoint& p : points_) best = std::max(best, p.f);
  return best;
}

double Sfd::peak_alpha() const {
  const double peak = peak_value();
  for (const SfdPoint& p : points_)
    if (close(p.f, peak)) return p.alpha;
  return points_.back().alpha;
}

bool approx_equal(const Sfd& a, const Sfd& b, double tol) {
  const auto& pa = a.points();
  const auto& pb = b.points();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (std::abs(pa[i].alpha - pb[i].alpha) > tol || std::abs(pa[i].f - pb[i].f) > tol) return false;
  }
  return true;
}

double sup_distance(const Sfd& a, const Sfd& b, double lo, double hi, int grid) {
  require(grid >= 2 && hi >= lo, "sup_distance: bad grid");
  double worst = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double alpha = lo + (hi - lo) * i / (grid - 1);
    const double fa = a(alpha), fb = b(alpha);
    if (std::isinf(fa) || std::isinf(fb)) {
      if (fa != fb) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, std::abs(fa - fb));
  }
  return worst;
}

Sfd sfd_levy(double mu) {
  require(mu > 0.0 && mu < 2.0, "sfd_levy: mu must lie in (0, 2), got " + std::to_string(mu));
  const double peak = 1.0 / mu;
  return Sfd({{0.0, 0.0}, {peak, 1.0}, {peak + 1.0, 0.0}});
}

Sfd sfd_power(const Sfd& f, double n) {
  require(n > 0.0 && std::isfinite(n), "sfd_power: exponent must be positive");
  std::vector<SfdPoint> pts = f.points();
  for (SfdPoint& p : pts) p.alpha *= n;
  return Sfd(std::move(pts));
}

Sfd sfd_sum(const Sfd& fx, const Sfd& fy) {
  if (fx.empty()) return fy;
  if (fy.empty()) return fx;
  const bool x_first = fx.peak_alpha() <= fy.peak_alpha();
  const Sfd& lead = x_first ? fx : fy;
  const Sfd& lag = x_first ? fy : fx;
  const double a0_lead = lead.peak_alpha();
  const double a0_lag = lag.peak_alpha();
  const auto p_lead = pieces_of(lead);
  const auto p_lag = pieces_of(lag);

  std::vector<Piece> out = restrict(p_lead, -std::numeric_limits<double>::infinity(), a0_lag);
  const auto below = restrict(p_lag, -std::numeric_limits<double>::infinity(), a0_lead);
  out.insert(out.end(), below.begin(), below.end());

  const Sfd g = envelope(saddle_integrand(p_lead, p_lag));
  if (!g.empty()) {
    std::vector<Piece> tail = running_max(g, std::max(g.alpha_max(), g.peak_value() - 1.0));
    for (Piece& p : tail) {
      p.f0 -= 1.0 + p.a0;
      p.f1 -= 1.0 + p.a1;
    }
    const auto saddle = restrict(tail, a0_lead, std::numeric_limits<double>::infinity());
    out.insert(out.end(), saddle.begin(), saddle.end());
  }
  return finish(out);
}

Sfd sfd_ratio(const Sfd& fx, const Sfd& fy) {
  require(!fy.empty(), "sfd_ratio: denominator is identically zero");
  if (fx.empty()) return fx;
  std::vector<Piece> out;
  for (const Piece& p : pieces_of(fx)) {
    for (const Piece& q : pieces_of(fy)) {
      // alpha = xi - eta with xi in [p.a0, p.a1], eta in [q.a0, q.a1]; the optimum over eta
      // sits at an end of the feasible interval, which switches only at these four alphas.
      std::vector<double> cuts = {p.a0 - q.a1, p.a0 - q.a0, p.a1 - q.a1, p.a1 - q.a0};
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double u, double v) { return close(u, v); }), cuts.end());
      auto value = [&](double alpha) {
        const double lo = std::max(q.a0, p.a0 - alpha);
        const double hi = std::min(q.a1, p.a1 - alpha);
        const double e_lo = std::min(lo, hi);
        const double e_hi = std::max(lo, hi);
        return std::max(p.at(alpha + e_lo) + q.at(e_lo), p.at(alpha + e_hi) + q.at(e_hi)) - 1.0;
      };
      if (cuts.size() == 1) {
        const double v = value(cuts[0]);
        out.push_back({cuts[0], cuts[0], v, v});
        continue;
      }
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) out.push_back({cuts[k], cuts[k + 1], value(cuts[k]), value(cuts[k + 1])});
    }
  }
  return finish(out);
}

Sfd sfd_extensive_sum(const Sfd& f, double beta) {
  require(beta >= 0.0 && beta <= 1.0, "sfd_extensive_sum: beta must lie in [0, 1]");
  const auto& src = f.points();
  std::vector<SfdPoint> pts;
  if (src.empty()) return Sfd();
  const double tol = 1e-12;
  double prev_alpha = src.front().alpha;
  double prev_value = src.front().f + beta;
  if (prev_value > 1.0 + tol) return Sfd();
  pts.push_back({prev_alpha, std::min(prev_value, 1.0)});
  if (prev_value >= 1.0 - tol) return Sfd(std::move(pts));
  for (std::size_t i = 1; i < src.size(); ++i) {
    const double a = src[i].alpha;
    const double v = src[i].f + beta;
    if (v < 1.0 - tol) {
      pts.push_back({a, v});
    } else {
      if (v <= 1.0 + tol) {
        pts.push_back({a, 1.0});
      } else if (a > prev_alpha) {
        pts.push_back({prev_alpha + (1.0 - prev_value) / (v - prev_value) * (a - prev_alpha), 1.0});
      }
      break;
    }
    prev_alpha = a;
    prev_value = v;
  }
  simplify(pts);
  return Sfd(std::move(pts));
}

LevelSpacingStages sfd_level_spacing_stages(double mu, double a, double b, double r) {
  require(mu > 0.0 && mu < 2.0, "sfd_level_spacing: mu must lie in (0, 2)");
  require(a > 0.0 && a < 1.0, "sfd_level_spacing: a must lie in (0, 1)");
  require(b > 0.0 && b < 1.0, "sfd_level_spacing: b must lie in (0, 1)");
  require(r > 0.0, "sfd_level_spacing: r must be positive");
  // Sums of arbitrarily signed Levy terms keep f_L, and a sum of f_R terms keeps f_R,
  // so a and r fix no shapes; only the cross-sector count b enters.
  LevelSpacingStages s;
  s.levy = sfd_levy(mu);
  s.levy_sq = sfd_power(s.levy, 2.0);
  s.diagonal = sfd_sum(s.levy, s.levy);
  s.ratio = sfd_ratio(s.levy_sq, s.levy);
  s.mixed = sfd_sum(s.diagonal, s.ratio);
  s.extensive = sfd_extensive_sum(s.levy_sq, b);
  s.energy = sfd_sum(s.mixed, s.extensive);
  s.spacing = sfd_sum(s.energy, s.energy);
  return s;
}

Sfd sfd_level_spacing(double mu, double a, double b, double r) { return sfd_level_spacing_stages(mu, a, b, r).spacing; }

Sfd sfd_empirical(std::span<const double> samples, const EmpiricalSfdOptions& options) {
  const std::size_t n = samples.size();
  require(n >= 1000, "sfd_empirical: need at least 1000 samples");
  require(options.n_bins >= 2, "sfd_empirical: need at least 2 bins");
  require(options.trim_fraction >= 0.0 && options.trim_fraction < 0.5, "sfd_empirical: trim fraction must lie in [0, 0.5)");
  double max_abs = 0.0;
  for (double x : samples) max_abs = std::max(max_abs, std::abs(x));
  require(max_abs > 0.0, "sfd_empirical: all samples are zero");
  const double ref = options.reference_scale > 0.0 ? options.reference_scale : max_abs;
  const double log_n = std::log(options.log_base > 0.0 ? options.log_base : static_cast<double>(n));
  require(log_n > 0.0, "sfd_empirical: scaling parameter must exceed 1");

  std::vector<double> alphas;
  alphas.reserve(n);
  for (double x : samples)
    if (x != 0.0) alphas.push_back(-std::log(std::abs(x) / ref) / log_n);
  const auto [lo_it, hi_it] = std::minmax_element(alphas.begin(), alphas.end());
  const double lo = *lo_it, hi = *hi_it;
  const double total = static_cast<double>(n);
  if (hi - lo <= 1e-12 * (1.0 + std::abs(lo))) {
    return Sfd({{lo, 1.0 + std::log(static_cast<double>(alphas.size()) / total) / log_n}});
  }

  const double width = (hi - lo) / options.n_bins;
  std::vector<std::size_t> counts(options.n_bins, 0);
  for (double a : alphas) {
    auto bin = static_cast<std::size_t>((a - lo) / width);
    ++counts[std::min<std::size_t>(bin, counts.size() - 1)];
  }
  std::vector<SfdPoint> pts;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double prob = static_cast<double>(counts[i]) / total;
    pts.push_back({lo + (i + 0.5) * width, 1.0 + std::log(prob / (width * log_n)) / log_n});
  }
  const auto trim = static_cast<std::size_t>(options.trim_fraction * static_cast<double>(pts.size()));
  if (pts.size() > 2 * trim + 1) pts = std::vector<SfdPoint>(pts.begin() + trim, pts.end() - trim);
  if (options.normalize_peak) {
    double peak = -std::numeric_limits<double>::infinity();
    for (const SfdPoint& p : pts) peak = std::max(peak, p.f);
    for (SfdPoint& p : pts) p.f += 1.0 - peak;
  }
  return Sfd(std::move(pts));
}

double crossover_bound(int n_fermions, int q, double c) {
  require(q >= 2 && n_fermions >= q, "crossover_bound: need N >= q >= 2");
  require(c >= 0.0 && c < 1.0, "crossover_bound: c must lie in [0, 1)");
  const double n = n_fermions;
  return std::log(n) / ((q * c + q) * n * std::log(2.0));
}

}  // namespace lsyk
