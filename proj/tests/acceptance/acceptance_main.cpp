// One PASS/FAIL line per acceptance criterion. Ensembles are cached under --data, so a
// second run only regenerates the derived tables.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsyk/edge.hpp"
#include "lsyk/eigensolver.hpp"
#include "lsyk/ensemble.hpp"
#include "lsyk/errors.hpp"
#include "lsyk/fit.hpp"
#include "lsyk/hierarchy.hpp"
#include "lsyk/io.hpp"
#include "lsyk/pauli.hpp"
#include "lsyk/rng.hpp"
#include "lsyk/sfd.hpp"
#include "lsyk/spectral.hpp"
#include "lsyk/stable.hpp"
#include "lsyk/syk.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace lsyk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path data;
  std::string cli;
  int jobs = 1;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------- sweeps ----------

std::map<std::string, std::string> main_sweep_keys(const Context& ctx) {
  return {{"N_list", "14:22:2"},
          {"mu_list", "0.1:2.0:0.1"},
          {"realizations", "200"},
          {"base_seed", "1"},
          {"output_dir", (ctx.data / "main").string()},
          {"cache_dir", (ctx.data / "spectra").string()}};
}

std::map<std::string, std::string> sff_sweep_keys(const Context& ctx) {
  return {{"N_list", "22"},
          {"mu_list", "1,2"},
          {"realizations", "400"},
          {"base_seed", "1"},
          {"output_dir", (ctx.data / "sff").string()},
          {"cache_dir", (ctx.data / "spectra").string()}};
}

// Through the command-line tool when one is given, in process otherwise.
void sweep(const Context& ctx, std::map<std::string, std::string> keys, int jobs) {
  keys["jobs"] = std::to_string(jobs);
  if (ctx.cli.empty()) {
    const SweepReport rep = run_sweep(EnsembleSpec::from_key_values(keys), &std::cerr);
    std::cerr << "computed " << rep.computed << ", cache hits " << rep.cache_hits << "\n";
    return;
  }
  std::string text;
  for (const auto& [k, v] : keys) text += k + " = " + v + "\n";
  const fs::path cfg = fs::path(keys.at("output_dir")).string() + ".cfg";
  write_text_file(cfg, text);
  const std::string cmd = "\"" + ctx.cli + "\" --config \"" + cfg.string() + "\" sweep";
  std::cerr << "+ " << cmd << "\n";
  if (std::system(cmd.c_str()) != 0) throw IoError("command failed: " + cmd);
}

CsvTable table(const fs::path& path) { return CsvTable::parse(read_text_file(path)); }

double cell(const CsvTable& t, std::size_t row, const std::string& col) { return std::stod(t.rows().at(row).at(t.column(col))); }

std::size_t find_row(const CsvTable& t, int n, double mu) {
  for (std::size_t i = 0; i < t.rows().size(); ++i)
    if (std::stoi(t.rows()[i][t.column("N")]) == n && std::abs(cell(t, i, "mu") - mu) < 1e-9) return i;
  throw IoError("no row for N=" + std::to_string(n) + " mu=" + fmt(mu));
}

// ---------- criteria ----------

Outcome algebra_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t checks = 0, failures = 0;
  auto check = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };
  for (int n = 2; n <= 10; n += 2) {
    const Eigen::Index dim = Eigen::Index(1) << (n / 2);
    const oracle::Mat id = oracle::Mat::Identity(dim, dim);
    for (int i = 1; i <= n; ++i) {
      const oracle::Mat a = dense(majorana(i, n));
      check(a.isApprox(oracle::majorana(i, n)));
      check((a * a).isApprox(id));
      for (int j = i + 1; j <= n; ++j) {
        const oracle::Mat b = dense(majorana(j, n));
        check((a * b + b * a).isZero(1e-14));
      }
    }
  }
  // commutation by overlap parity, and dense equality of every string at N = 8
  const int n = 8;
  std::vector<std::vector<int>> strings;
  for (int q = 1; q <= n; ++q) {
    std::vector<int> t(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) t[static_cast<std::size_t>(k)] = k + 1;
    do strings.push_back(t);
    while (next_combination(t, n));
  }
  std::vector<oracle::Mat> mats;
  for (const auto& s : strings) {
    mats.push_back(dense(majorana_string(s, n)));
    check(mats.back().isApprox(oracle::majorana_string(s, n)));
  }
  for (std::size_t a = 0; a < strings.size(); ++a)
    for (std::size_t b = a; b < strings.size(); b += 7) {
      if (strings[a].size() % 2 || strings[b].size() % 2) continue;
      std::vector<int> common;
      std::set_intersection(strings[a].begin(), strings[a].end(), strings[b].begin(), strings[b].end(),
                            std::back_inserter(common));
      const bool rule = common.size() % 2 == 0;
      const PauliString pa = majorana_string(strings[a], n), pb = majorana_string(strings[b], n);
      check(commutes(pa, pb) == rule);
      check((mats[a] * mats[b] - mats[b] * mats[a]).isZero(1e-12) == rule);
    }
  const double t = seconds_since(t0);
  return {failures == 0 && t < 10.0,
          std::to_string(checks - failures) + "/" + std::to_string(checks) + " checks, " + fmt(t, 3) + " s"};
}

Outcome gaussian_reduction(const Context& ctx) {
  const CsvTable r = table(ctx.data / "main" / "r_table.csv");
  struct Case {
    int n;
    double want, tol;
  } cases[] = {{22, 0.5996, 0.01}, {16, 0.5307, 0.01}, {20, 0.6744, 0.015}};
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const std::size_t row = find_row(r, c.n, 2.0);
    const double got = cell(r, row, "r_mean");
    ok = ok && std::abs(got - c.want) <= c.tol;
    detail += "N=" + std::to_string(c.n) + " " + r.rows()[row][r.column("class")] + " <r>=" + fmt(got) + " (" +
              fmt(c.want) + "); ";
  }
  return {ok, detail};
}

Outcome poisson_baseline() {
  CounterRng rng(derive_seed(3, 0));
  std::vector<double> rs;
  for (int s = 0; s < 40; ++s) {
    std::vector<double> levels(2000);
    for (double& v : levels) v = rng.uniform_open();
    std::sort(levels.begin(), levels.end());
    rs.push_back(r_statistic(levels).mean);
  }
  const EnsembleStats st = summarize_r(rs);
  return {std::abs(st.mean_r - 0.386) <= 0.01, "<r>=" + fmt(st.mean_r) + " +- " + fmt(st.stderr_r, 2)};
}

Outcome crossover_scaling(const Context& ctx) {
  const CsvTable m = table(ctx.data / "main" / "mu_c.csv");
  std::map<double, std::vector<std::pair<int, double>>> by_threshold;
  for (std::size_t i = 0; i < m.rows().size(); ++i)
    by_threshold[cell(m, i, "threshold")].emplace_back(std::stoi(m.rows()[i][m.column("N")]), cell(m, i, "mu_c"));
  auto main = by_threshold[kMainThreshold];
  std::sort(main.begin(), main.end());
  bool monotone = main.size() == 5;
  std::string list;
  for (std::size_t i = 0; i < main.size(); ++i) {
    list += std::to_string(main[i].first) + ":" + fmt(main[i].second, 2) + " ";
    if (!std::isfinite(main[i].second) || (i > 0 && main[i].second > main[i - 1].second + 1e-9)) monotone = false;
  }
  const CsvTable f = table(ctx.data / "main" / "fit_summary.csv");
  std::map<std::string, double> eta1;
  for (std::size_t i = 0; i < f.rows().size(); ++i)
    if (f.rows()[i][0] == "eta1") eta1[f.rows()[i][1]] = cell(f, i, "value");
  const double eta = eta1["threshold=0.1"];
  const bool in_range = eta >= 0.6 && eta <= 1.5;
  return {monotone && in_range, "mu_c(N) " + list + "eta1=" + fmt(eta) + " [thr 0.06: " + fmt(eta1["threshold=0.06"]) +
                                    ", 0.12: " + fmt(eta1["threshold=0.12"]) + ", 0.01: " + fmt(eta1["threshold=0.01"]) +
                                    "]" + (monotone ? "" : " not monotone")};
}

Outcome sff_shape(const Context& ctx) {
  const CsvTable s = table(ctx.data / "sff" / "sff_table.csv");
  const std::size_t two = find_row(s, 22, 2.0), one = find_row(s, 22, 1.0);
  const double signif = cell(s, two, "frac_signif_above_rmt");
  const bool no_bump = signif <= 0.02 && s.rows()[two][s.column("peak_found")] == "0";
  const bool peak = s.rows()[one][s.column("peak_found")] == "1" && cell(s, one, "K_c_peak") > cell(s, one, "K_rmt_peak");
  const double p2 = cell(s, two, "plateau"), p1 = cell(s, one, "plateau");
  const bool plateau = std::abs(p2 - 1.0) <= 0.05 && std::abs(p1 - 1.0) <= 0.05;
  return {no_bump && peak && plateau,
          "mu=2: above ramp by >3 SE " + fmt(100 * signif, 3) + "% (raw above " +
              fmt(100 * cell(s, two, "frac_above_rmt"), 3) + "%), peak " + s.rows()[two][s.column("peak_found")] +
              "; mu=1: tau*=" + fmt(cell(s, one, "tau_star")) + " K_c=" + fmt(cell(s, one, "K_c_peak")) +
              " ref=" + fmt(cell(s, one, "K_rmt_peak")) + "; plateau " + fmt(p2) + ", " + fmt(p1)};
}

Outcome thouless_scaling(const Context& ctx) {
  const CsvTable s = table(ctx.data / "main" / "sff_table.csv");
  std::vector<ThoulessRow> all, three;
  for (std::size_t i = 0; i < s.rows().size(); ++i) {
    const int n = std::stoi(s.rows()[i][s.column("N")]);
    const ThoulessRow row{n, cell(s, i, "mu"), cell(s, i, "tau_th")};
    if (!std::isfinite(row.tau_th)) continue;
    all.push_back(row);
    if (n == 14 || n == 18 || n == 22) three.push_back(row);
  }
  std::vector<double> t2;
  for (const ThoulessRow& r : three)
    if (std::abs(r.mu - 2.0) < 1e-9) t2.push_back(r.tau_th);
  const bool decreasing = t2.size() == 3 && t2[0] > t2[1] && t2[1] > t2[2];
  const ThoulessScaling ts = fit_thouless_scaling(three);
  double a1 = std::nan(""), a2 = std::nan("");
  for (std::size_t i = 0; i < ts.mu_values.size(); ++i) {
    if (std::abs(ts.mu_values[i] - 1.0) < 1e-9) a1 = ts.alpha_mu[i];
    if (std::abs(ts.mu_values[i] - 2.0) < 1e-9) a2 = ts.alpha_mu[i];
  }
  std::vector<double> etas;
  for (Bracket b : {Bracket::low, Bracket::mid, Bracket::high}) {
    const ThoulessScaling t = fit_thouless_scaling(all, b);
    etas.push_back(t.has_fit ? t.eta2 : std::nan(""));
  }
  const double spread = *std::max_element(etas.begin(), etas.end()) - *std::min_element(etas.begin(), etas.end());
  const bool eta_ok = etas[1] >= 0.8 && etas[1] <= 2.2 && spread < 0.6;
  return {decreasing && a2 > 0.0 && a1 < a2 && eta_ok,
          "alpha_2=" + fmt(a2) + " alpha_1=" + fmt(a1) + (decreasing ? "" : " tau_Th(mu=2) not decreasing") +
              "; eta2 low/mid/high " + fmt(etas[0]) + "/" + fmt(etas[1]) + "/" + fmt(etas[2])};
}

std::vector<double> stable_draws(double mu, double sigma, std::size_t n, std::uint64_t seed) {
  const StableParams p(mu, sigma);
  CounterRng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = sample_stable(p, rng);
  return x;
}

// No sample falls below the largest one, so the estimator's support starts at its first bin.
double empirical_distance(const Sfd& empirical, const Sfd& exact, double lo, double hi) {
  const double start = std::max(lo, empirical.alpha_min());
  if (start > lo + 0.1) return std::numeric_limits<double>::infinity();
  return sup_distance(empirical, exact, start, hi, 201);
}

Outcome levy_sampler() {
  bool ok = true;
  std::string detail;
  for (double mu : {0.5, 1.0, 1.5}) {
    const double hill = tail_index_estimate(stable_draws(mu, 1.0, 1000000, 7001), 10000);
    ok = ok && std::abs(hill / mu - 1.0) <= 0.1;
    detail += "Hill(" + fmt(mu, 2) + ")=" + fmt(hill) + " ";
  }
  const double sigma = 0.8;
  auto x = stable_draws(2.0, sigma, 1000000, 7002);
  std::sort(x.begin(), x.end());
  const double sd = std::numbers::sqrt2 * sigma, n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-x[i] / (sd * std::numbers::sqrt2));
    d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  ok = ok && d < 0.01;
  return {ok, detail + "KS(mu=2)=" + fmt(d, 3)};
}

Outcome sfd_engine() {
  const auto t0 = std::chrono::steady_clock::now();
  auto pts = [](std::vector<SfdPoint> p) { return Sfd(std::move(p)); };
  auto f_l2 = [&](double mu) { return pts({{0, 0}, {2 / mu, 1}, {2 / mu + 2, 0}}); };
  auto f_s = [&](double mu, double beta) { return pts({{0, beta}, {2 * (1 - beta) / mu, 1}}); };
  auto f_lr = [&](double mu) { return pts({{0, 0.5}, {1 / mu, 1}, {1 / mu + 1, 0}}); };
  auto f_e_high = [&](double mu, double b) {
    const double a0 = 2 * (1 - b) / mu, tail = 1.5 - b + a0;
    return pts({{0, b}, {a0, 1}, {a0, tail - a0}, {tail, 0}});
  };
  auto f_delta = [&](double mu, double b) {
    const double a0 = std::min(1 / mu, 2 * (1 - b) / mu), start = std::max(b, 0.5);
    return pts({{0, start}, {a0, mu * a0 / 2 + start}, {1 + a0, 0}});
  };
  int passed = 0, total = 0;
  auto check = [&](bool ok) {
    ++total;
    passed += ok;
  };
  for (double mu : {0.4, 1.0, 1.5}) {
    const Sfd l = sfd_levy(mu), l2 = sfd_power(l, 2);
    check(approx_equal(l2, f_l2(mu)));
    check(approx_equal(sfd_extensive_sum(l2, 0.75), f_s(mu, 0.75)));
    check(approx_equal(sfd_sum(l, sfd_ratio(l2, l)), f_lr(mu)));
    check(approx_equal(sfd_level_spacing_stages(mu, 0.5, 0.3).energy, f_lr(mu)));
    check(approx_equal(sfd_level_spacing_stages(mu, 0.5, 0.75).energy, f_e_high(mu, 0.75)));
    for (double b : {0.3, 0.4, 0.6, 0.75}) check(approx_equal(sfd_level_spacing(mu, 0.5, b), f_delta(mu, b)));
  }
  // Printed ratio form; its large-alpha branch is derived for mu <= 1/2.
  bool printed_above_half = true;
  for (double mu : {0.25, 0.4, 0.5}) {
    const Sfd r = sfd_ratio(f_l2(mu), sfd_levy(mu));
    check(approx_equal(r, pts({{0, 0.5}, {1 / mu, 1}, {2 / mu, 0}})));
  }
  for (double mu : {1.0, 1.5}) {
    const Sfd r = sfd_ratio(f_l2(mu), sfd_levy(mu));
    check(approx_equal(r, pts({{0, 0.5}, {1 / mu, 1}, {2 + 1 / mu, 0}})));
    printed_above_half = printed_above_half && approx_equal(r, pts({{0, 0.5}, {1 / mu, 1}, {2 / mu, 0}}));
  }
  const int exact_total = total;
  const int exact_passed = passed;

  // empirical SFDs on 10^6 samples
  const std::size_t n = 1000000;
  const auto x = stable_draws(1.0, 1.0, n, 7003);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = x[i] * x[i];
  EmpiricalSfdOptions opt;
  opt.n_bins = 40;
  opt.normalize_peak = true;
  opt.reference_scale = static_cast<double>(n);
  const double d1 = empirical_distance(sfd_empirical(x, opt), sfd_levy(1.0), 0.1, 0.9);
  opt.reference_scale = static_cast<double>(n) * static_cast<double>(n);
  const double d2 = empirical_distance(sfd_empirical(sq, opt), sfd_power(sfd_levy(1.0), 2), 0.2, 1.8);
  const double t = seconds_since(t0);
  return {exact_passed == exact_total && d1 < 0.1 && d2 < 0.1,
          std::to_string(exact_passed) + "/" + std::to_string(exact_total) + " exact forms; empirical sup " + fmt(d1, 3) +
              ", " + fmt(d2, 3) + "; " + fmt(t, 3) + " s" +
              (printed_above_half ? "" : "; printed ratio tail 2 - mu a does not hold for mu > 1/2")};
}

double median_ratio(int n, double mu, int tensors, std::uint64_t base) {
  std::vector<double> r;
  for (int i = 0; i < tensors; ++i)
    r.push_back(outlier_ratio(sample_couplings(n, 4, 1.0, mu, derive_seed(base, static_cast<std::uint64_t>(i))).values));
  std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(r.size() / 2), r.end());
  return r[r.size() / 2];
}

Outcome hierarchy() {
  bool slopes = true;
  std::string detail = "census slope / -ln Ncal:";
  const int n = 20;
  for (double mu : {0.5, 1.0, 1.5}) {
    std::vector<CensusBin> pooled;
    for (int s = 0; s < 100; ++s) {
      const auto bins = hierarchy_census(sample_couplings(n, 4, 1.0, mu, derive_seed(9001, static_cast<std::uint64_t>(s))), 10);
      if (pooled.empty()) pooled = bins;
      else
        for (std::size_t k = 0; k < bins.size(); ++k) pooled[k].observed += bins[k].observed;
    }
    const double rel = census_slope(pooled) / -std::log(static_cast<double>(binomial(n, 4)));
    slopes = slopes && std::abs(rel - 1.0) <= 0.15;
    detail += " " + fmt(rel, 3);
  }
  const double low = median_ratio(16, 0.8, 200, 9002), high = median_ratio(16, 1.5, 200, 9002);
  return {slopes && low > 1.0 && high < 1.0,
          detail + "; median ratio mu=0.8: " + fmt(low, 3) + ", mu=1.5: " + fmt(high, 3)};
}

Outcome perturbative() {
  const int n = 12;
  int eligible = 0, accurate = 0, bubbles = 0;
  std::vector<double> errors;
  for (std::uint64_t s = 0; s < 5000 && eligible < 200; ++s) {
    SykConfig c;
    c.N = n;
    c.mu = 0.4;
    c.seed = derive_seed(10001, s);
    const CouplingTensor t = sample_couplings(n, 4, 1.0, 0.4, c.seed);
    if (outlier_ratio(t.values) <= 3.0) continue;
    ++eligible;
    const auto exact = full_spectrum(build_hamiltonian(c, t), make_meta(c)).eigenvalues;
    const auto est = perturbative_spectrum(t, c.sector).estimates;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      num += (est[i] - exact[i]) * (est[i] - exact[i]);
      den += exact[i] * exact[i];
    }
    errors.push_back(std::sqrt(num / den));
    if (errors.back() < 0.05) ++accurate;
    double j1 = 0.0;
    for (double v : t.values) j1 = std::max(j1, std::abs(v));
    const auto [lo, hi] = two_means(exact);
    if (std::abs(-lo / j1 - 1.0) <= 0.1 && std::abs(hi / j1 - 1.0) <= 0.1) ++bubbles;
  }
  std::sort(errors.begin(), errors.end());
  return {eligible > 0 && 10 * accurate >= 8 * eligible && bubbles == eligible,
          std::to_string(accurate) + "/" + std::to_string(eligible) + " seeds under 5% (median " +
              fmt(errors[errors.size() / 2], 3) + ", max " + fmt(errors.back(), 3) + "); two clusters at +-|J1| in " +
              std::to_string(bubbles) + "/" + std::to_string(eligible)};
}

Outcome structural(const Context& ctx) {
  std::size_t realizations = 0, gersh_fail = 0, trace_fail = 0, kramers = 0, kramers_fail = 0;
  double kramers_rel = 0.0, union_rel = 0.0;
  const EnsembleSpec spec = EnsembleSpec::from_key_values(main_sweep_keys(ctx));
  for (int n : spec.N_list)
    for (double mu : spec.mu_list)
      for (int i = 0; i < spec.realizations; ++i) {
        SykConfig c;
        c.N = n;
        c.mu = mu;
        c.seed = realization_seed(spec.base_seed, static_cast<std::size_t>(i));
        const SpectrumMeta meta = make_meta(c);
        const auto cached =
            load_cached_spectrum(spec.spectra_dir() / spectrum_filename(meta), meta, sector_dimension(n / 2, c.sector));
        if (!cached) throw IoError("missing cached spectrum for N=" + std::to_string(n));
        const auto& ev = cached->eigenvalues;
        const HermitianMatrix h = build_hamiltonian(c, sample_couplings(n, 4, 1.0, mu, c.seed));
        ++realizations;
        if (!inside_disc_union(gershgorin_discs(h), ev, 1e-12 * h.max_abs())) ++gersh_fail;
        double sum = 0.0, abs_sum = 0.0;
        for (double v : ev) {
          sum += v;
          abs_sum += std::abs(v);
        }
        if (std::abs(sum - h.trace()) > 1e-8 * abs_sum) ++trace_fail;
        if (symmetry_class(n) == SymmetryClass::GSE) {
          ++kramers;
          double gap = 0.0;
          for (std::size_t k = 0; k + 1 < ev.size(); k += 2) gap = std::max(gap, ev[k + 1] - ev[k]);
          if (!(gap <= 1e-9)) ++kramers_fail;
          kramers_rel = std::max(kramers_rel, kramers_pair_gap(ev));
        }
      }
  // sector union needs the full space; every grid mu at N = 10, 12, 14
  std::size_t unions = 0, union_fail = 0;
  for (int n : {10, 12, 14})
    for (double mu : spec.mu_list)
      for (std::uint64_t s = 0; s < 10; ++s) {
        SykConfig c;
        c.N = n;
        c.mu = mu;
        c.seed = derive_seed(11001, s);
        const CouplingTensor t = sample_couplings(n, 4, 1.0, mu, c.seed);
        std::vector<double> both;
        for (Sector sec : {Sector::even, Sector::odd}) {
          c.sector = sec;
          const auto ev = full_spectrum(build_hamiltonian(c, t), make_meta(c)).eigenvalues;
          both.insert(both.end(), ev.begin(), ev.end());
        }
        std::sort(both.begin(), both.end());
        c.sector = Sector::full;
        const auto full = full_spectrum(build_hamiltonian(c, t), make_meta(c)).eigenvalues;
        ++unions;
        if (both.size() != full.size()) throw NumericalError("sector dimensions do not add up at N=" + std::to_string(n));
        double worst = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < both.size(); ++k) {
          worst = std::max(worst, std::abs(both[k] - full[k]));
          scale = std::max(scale, std::abs(full[k]));
        }
        if (!(worst <= 1e-10)) ++union_fail;
        union_rel = std::max(union_rel, worst / scale);
      }
  const bool ok = gersh_fail == 0 && trace_fail == 0 && kramers_fail == 0 && union_fail == 0 && kramers > 0;
  return {ok, std::to_string(realizations) + " realizations: Gershgorin failures " + std::to_string(gersh_fail) +
                  ", trace failures " + std::to_string(trace_fail) + ", Kramers failures " + std::to_string(kramers_fail) +
                  "/" + std::to_string(kramers) + "; sector union failures " + std::to_string(union_fail) + "/" +
                  std::to_string(unions) + "; worst relative to max|E|: Kramers " + fmt(kramers_rel, 3) + ", union " +
                  fmt(union_rel, 3)};
}

// Byte comparison of every CSV under a against b.
std::size_t compare_tables(const fs::path& a, const fs::path& b, std::vector<std::string>& differing) {
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    const fs::path rel = fs::relative(e.path(), a);
    ++compared;
    std::error_code ec;
    if (!fs::exists(b / rel, ec) || read_text_file(e.path()) != read_text_file(b / rel)) differing.push_back(rel.string());
  }
  return compared;
}

Outcome determinism(const Context& ctx) {
  // fresh sweep computed twice from empty caches, then the main sweep re-derived with more workers
  const fs::path root = ctx.data / "determinism";
  fs::remove_all(root);
  std::vector<std::string> differing;
  std::size_t compared = 0;
  const int other = ctx.jobs == 1 ? 3 : 1;
  for (int jobs : {ctx.jobs, other}) {
    const std::string tag = "fresh_j" + std::to_string(jobs);
    sweep(ctx,
          {{"N_list", "14,16,18"},
           {"mu_list", "0.5,1,2"},
           {"realizations", "20"},
           {"base_seed", "12"},
           {"output_dir", (root / tag).string()},
           {"cache_dir", (root / (tag + "_spectra")).string()}},
          jobs);
  }
  compared += compare_tables(root / ("fresh_j" + std::to_string(ctx.jobs)), root / ("fresh_j" + std::to_string(other)), differing);
  auto keys = main_sweep_keys(ctx);
  keys["output_dir"] = (root / "main_rerun").string();
  sweep(ctx, keys, ctx.jobs + 1);
  compared += compare_tables(ctx.data / "main", root / "main_rerun", differing);
  std::string detail = std::to_string(compared - differing.size()) + "/" + std::to_string(compared) + " tables identical";
  for (const auto& d : differing) detail += " " + d;
  return {differing.empty() && compared > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  Context ctx;
  ctx.data = "acceptance_data";
  std::string data = ctx.data.string();
  std::vector<int> expected_failures;
  app.add_option("--data", data, "cache and output directory for the ensembles");
  app.add_option("--cli", ctx.cli, "lsyk executable; sweeps run in process when omitted");
  app.add_option("--jobs", ctx.jobs, "worker threads for the sweeps")->check(CLI::PositiveNumber);
  app.add_option("--expect-fail", expected_failures, "criteria documented as unattainable; their FAIL does not fail the run");
  CLI11_PARSE(app, argc, argv);
  ctx.data = data;
  fs::create_directories(ctx.data);
  pin_solver_threads();

  try {
    sweep(ctx, main_sweep_keys(ctx), ctx.jobs);
    sweep(ctx, sff_sweep_keys(ctx), ctx.jobs);
  } catch (const std::exception& e) {
    std::cerr << "sweep failed: " << e.what() << "\n";
    return 2;
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"algebra suite", algebra_suite},
      {"Gaussian reduction", [&] { return gaussian_reduction(ctx); }},
      {"Poisson baseline", poisson_baseline},
      {"crossover direction and scaling", [&] { return crossover_scaling(ctx); }},
      {"SFF shape", [&] { return sff_shape(ctx); }},
      {"Thouless scaling", [&] { return thouless_scaling(ctx); }},
      {"Levy sampler", levy_sampler},
      {"SFD engine", sfd_engine},
      {"hierarchy", hierarchy},
      {"perturbative spectrum", perturbative},
      {"structural invariants", [&] { return structural(ctx); }},
      {"determinism", [&] { return determinism(ctx); }},
  };
  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool expected = std::find(expected_failures.begin(), expected_failures.end(), id) != expected_failures.end();
    if (!o.pass && !expected) ++unexpected;
    std::printf("%2d %-32s %s  %s%s\n", id, criteria[k].first.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                !o.pass && expected ? "  [documented]" : "");
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
