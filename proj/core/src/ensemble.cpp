#include "lsyk/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "lsyk/edge.hpp"
#include "lsyk/errors.hpp"
#include "lsyk/io.hpp"
#include "lsyk/rng.hpp"

namespace lsyk {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSignificance = 3.0;

double parse_real(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParameterError("not a number: '" + text + "'");
  return value;
}

long long parse_integer(const std::string& text) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParameterError("not an integer: '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ParameterError("not a boolean: '" + text + "'");
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string cell_name(int n, double mu) { return "N" + std::to_string(n) + "_mu" + format_number(mu); }

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
      if (c == ':') {
        parts.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur += c;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 3) throw ParameterError("range must be start:stop:step, got '" + text + "'");
    const double start = parse_real(parts[0]), stop = parse_real(parts[1]), step = parse_real(parts[2]);
    require(step > 0.0 && stop >= start, "range: need step > 0 and stop >= start");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= count; ++i) out.push_back(std::round((start + step * static_cast<double>(i)) * 1e9) / 1e9);
    return out;
  }
  for (const std::string& s : split_commas(text)) out.push_back(parse_real(s));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_real_list(text)) {
    require(v == std::floor(v), "integer list contains a non-integer");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

EnsembleSpec::EnsembleSpec() : mu_list(parse_real_list("0.1:2.0:0.1")) {}

void EnsembleSpec::validate() const {
  require(!N_list.empty() && !mu_list.empty(), "EnsembleSpec: N_list and mu_list must be non-empty");
  for (int n : N_list) require(n >= q && n % 2 == 0 && n <= 30, "EnsembleSpec: every N must be even with q <= N <= 30");
  for (double mu : mu_list) require(mu > 0.0 && mu <= 2.0, "EnsembleSpec: every mu must lie in (0, 2]");
  require(realizations >= 1, "EnsembleSpec: realizations must be >= 1");
  require(q >= 2 && q % 2 == 0, "EnsembleSpec: q must be even and >= 2");
  require(J > 0.0, "EnsembleSpec: J must be positive");
  require(eta > 0.0, "EnsembleSpec: eta must be positive");
  require(r_threshold > 0.0 && r_threshold < 1.0, "EnsembleSpec: r_threshold must lie in (0, 1)");
  require(thouless_threshold > 0.0 && thouless_threshold < 1.0, "EnsembleSpec: thouless_threshold must lie in (0, 1)");
  require(close_to_one > 0.0 && close_to_one <= 1.0, "EnsembleSpec: close_to_one must lie in (0, 1]");
  require(r_window > 0.0 && r_window <= 1.0, "EnsembleSpec: r_window must lie in (0, 1]");
  require(unfold_degree >= 1, "EnsembleSpec: unfold_degree must be >= 1");
  require(unfold_max_degree >= unfold_degree, "EnsembleSpec: unfold_max_degree must be >= unfold_degree");
  require(unfold_window > 0.0 && unfold_window <= 1.0, "EnsembleSpec: unfold_window must lie in (0, 1]");
  require(tau.lo > 0.0 && tau.hi > tau.lo && tau.points >= 2, "EnsembleSpec: bad tau grid");
  require(smoothing >= 1 && smoothing <= tau.points, "EnsembleSpec: smoothing window must fit in the tau grid");
  require(jobs >= 1, "EnsembleSpec: jobs must be >= 1");
}

fs::path EnsembleSpec::spectra_dir() const { return cache_dir.empty() ? output_dir / "spectra" : cache_dir; }

EnsembleSpec EnsembleSpec::from_key_values(const std::map<std::string, std::string>& kv) {
  EnsembleSpec s;
  for (const auto& [key, value] : kv) {
    if (key == "N_list") s.N_list = parse_int_list(value);
    else if (key == "mu_list") s.mu_list = parse_real_list(value);
    else if (key == "realizations") s.realizations = static_cast<int>(parse_integer(value));
    else if (key == "base_seed") s.base_seed = static_cast<std::uint64_t>(parse_integer(value));
    else if (key == "q") s.q = static_cast<int>(parse_integer(value));
    else if (key == "J") s.J = parse_real(value);
    else if (key == "eta") s.eta = parse_real(value);
    else if (key == "r_threshold")
      s.r_threshold = value == "main" ? kMainThreshold : value == "supplement" ? kSupplementThreshold : parse_real(value);
    else if (key == "r_window") s.r_window = parse_real(value);
    else if (key == "thouless_threshold") s.thouless_threshold = parse_real(value);
    else if (key == "close_to_one") s.close_to_one = parse_real(value);
    else if (key == "unfold_degree") s.unfold_degree = static_cast<int>(parse_integer(value));
    else if (key == "unfold_max_degree") s.unfold_max_degree = static_cast<int>(parse_integer(value));
    else if (key == "unfold_window") s.unfold_window = parse_real(value);
    else if (key == "tau_lo") s.tau.lo = parse_real(value);
    else if (key == "tau_hi") s.tau.hi = parse_real(value);
    else if (key == "tau_points") s.tau.points = static_cast<std::size_t>(parse_integer(value));
    else if (key == "smoothing") s.smoothing = static_cast<std::size_t>(parse_integer(value));
    else if (key == "compute_sff") s.compute_sff = parse_bool(value);
    else if (key == "output_dir") s.output_dir = value;
    else if (key == "cache_dir") s.cache_dir = value;
    else if (key == "jobs") s.jobs = static_cast<int>(parse_integer(value));
    else throw ParameterError("unknown config key '" + key + "'");
  }
  return s;
}

std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t index) { return derive_seed(base_seed, index); }

Spectrum compute_spectrum(const SykConfig& config) {
  config.validate();
  const CouplingTensor couplings = sample_couplings(config.N, config.q, config.J, config.mu, config.seed);
  return full_spectrum(build_hamiltonian(config, couplings), make_meta(config));
}

std::optional<Spectrum> load_cached_spectrum(const fs::path& path, const SpectrumMeta& expected, std::size_t dimension) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    Spectrum s = spectrum_from_json(read_text_file(path));
    if (!(s.meta == expected) || s.eigenvalues.size() != dimension) return std::nullopt;
    if (!std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end())) return std::nullopt;
    return s;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

SykConfig cell_config(const EnsembleSpec& spec, int n, double mu, std::size_t index) {
  SykConfig c;
  c.N = n;
  c.q = spec.q;
  c.J = spec.J;
  c.mu = mu;
  c.seed = realization_seed(spec.base_seed, index);
  c.sector = Sector::even;
  return c;
}

CellSummary summarize_cell(const EnsembleSpec& spec, int n, double mu) {
  CellSummary out;
  out.N = n;
  out.mu = mu;
  const auto r_count = static_cast<std::size_t>(spec.realizations);
  const SymmetryClass cls = symmetry_class(n);
  std::vector<std::vector<double>> levels(r_count);
  std::vector<double> r_values, e1, e2;
  for (std::size_t i = 0; i < r_count; ++i) {
    const SykConfig config = cell_config(spec, n, mu, i);
    const SpectrumMeta meta = make_meta(config);
    const fs::path path = spec.spectra_dir() / spectrum_filename(meta);
    std::optional<Spectrum> s = load_cached_spectrum(path, meta, sector_dimension(n / 2, config.effective_sector()));
    if (!s) throw IoError("missing or stale spectrum " + path.string());
    if (cls == SymmetryClass::GSE) s = dedupe_kramers(*s);
    levels[i] = std::move(s->eigenvalues);
    const RStatistic r = r_statistic(levels[i], spec.r_window);
    r_values.push_back(r.mean);
    out.zero_spacings += r.zero_spacings;
    e1.push_back(levels[i][0]);
    e2.push_back(levels[i][1]);
  }
  out.realizations = r_count;
  const EnsembleStats stats = summarize_r(r_values, spec.r_window);
  out.r_mean = stats.mean_r;
  out.r_stderr = stats.stderr_r;

  out.log_avg_emin = out.raw_avg_emin = kNaN;
  if (r_count >= 10) {
    const GroundStateStats gs = ground_state_stats(e1);
    out.log_avg_emin = gs.log_avg;
    out.raw_avg_emin = gs.raw_avg;
    out.emin_excluded = gs.n_excluded;
  }
  out.a_ratio = r_count >= 30 ? a_ratio(e1, e2) : kNaN;

  out.tau_th = out.tau_dip = out.frac_above_rmt = out.frac_signif_above_rmt = out.plateau = kNaN;
  out.peak.tau_star = out.peak.k_peak = out.peak.k_ref = kNaN;
  if (!spec.compute_sff || r_count < 2) return out;

  std::vector<UnfoldedSpectrum> unfolded;
  unfolded.reserve(r_count);
  const UnfoldOptions unfold_options{spec.unfold_degree, spec.unfold_max_degree, spec.unfold_window, 0.02};
  std::size_t unfold_rejected = 0;
  for (const auto& lv : levels) {
    std::optional<UnfoldedSpectrum> u = unfold_adaptive(lv, unfold_options);
    if (!u) {
      ++unfold_rejected;
      continue;
    }
    if (u->degree > spec.unfold_degree) ++out.degree_raised;
    unfolded.push_back(std::move(*u));
  }
  const std::vector<double> tau = log_tau_grid(spec.tau.lo, spec.tau.hi, spec.tau.points);
  SffCurve curve;
  try {
    curve = sff(unfolded, spec.eta, tau, cls, spec.smoothing);
  } catch (const ParameterError&) {
    out.sff_rejected = r_count;
    return out;
  }
  out.sff_used = curve.n_realizations;
  out.sff_rejected = curve.n_rejected + unfold_rejected;
  const std::vector<double>& smooth = curve.k_connected_smooth;
  const std::vector<double>& ref = curve.k_rmt_smooth;
  const std::vector<double>& err = curve.k_connected_smooth_stderr;
  out.tau_th = thouless_time(tau, smooth, ref, spec.thouless_threshold);
  out.tau_dip = sff_dip(curve);
  out.peak = sff_peak(tau, smooth, ref, out.tau_dip, out.tau_th);
  std::size_t ramp = 0, above = 0, signif = 0, late = 0;
  double late_sum = 0.0;
  for (std::size_t t = 0; t < tau.size(); ++t) {
    if (tau[t] >= out.tau_dip && tau[t] < 1.0) {
      ++ramp;
      if (smooth[t] > ref[t]) ++above;
      if (smooth[t] > ref[t] + kSignificance * err[t]) ++signif;
    }
    if (tau[t] >= 2.0) {
      ++late;
      late_sum += curve.k_connected[t];
    }
  }
  if (ramp > 0) {
    out.frac_above_rmt = static_cast<double>(above) / static_cast<double>(ramp);
    if (std::isfinite(err.front())) out.frac_signif_above_rmt = static_cast<double>(signif) / static_cast<double>(ramp);
  }
  out.plateau = late ? late_sum / static_cast<double>(late) : kNaN;

  CsvTable table({"tau", "K", "K_dc", "K_c", "K_c_smooth", "K_c_smooth_stderr", "K_rmt", "K_rmt_smooth"});
  for (std::size_t t = 0; t < tau.size(); ++t)
    table.row({format_number(tau[t]), format_number(curve.k_full[t]), format_number(curve.k_disconnected[t]),
               format_number(curve.k_connected[t]), format_number(smooth[t]), format_number(err[t]),
               format_number(curve.k_rmt[t]), format_number(ref[t])});
  write_text_file(spec.output_dir / "sff" / (cell_name(n, mu) + ".csv"), table.str());
  return out;
}

void write_derived_tables(const EnsembleSpec& spec, const std::vector<CellSummary>& cells) {
  CsvTable r_table({"N", "mu", "class", "R", "r_mean", "r_stderr", "delta_r", "zero_spacings"});
  CsvTable edge_table({"N", "mu", "R", "log_avg_Emin", "raw_avg_Emin", "Emin_excluded", "A", "A_over_mu2"});
  CsvTable sff_table({"N", "mu", "R_used", "rejected", "degree_raised", "tau_th", "peak_found", "tau_star", "K_c_peak",
                      "K_rmt_peak", "tau_dip", "frac_above_rmt", "frac_signif_above_rmt", "plateau"});
  std::map<int, double> a_at_two;
  for (const CellSummary& c : cells)
    if (c.mu == 2.0) a_at_two[c.N] = c.a_ratio;
  for (const CellSummary& c : cells) {
    const double r_rmt = rmt_r_value(symmetry_class(c.N));
    r_table.row({std::to_string(c.N), format_number(c.mu), to_string(symmetry_class(c.N)), std::to_string(c.realizations),
                 format_number(c.r_mean), format_number(c.r_stderr), format_number((c.r_mean - r_rmt) / r_rmt),
                 std::to_string(c.zero_spacings)});
    const auto two = a_at_two.find(c.N);
    edge_table.row({std::to_string(c.N), format_number(c.mu), std::to_string(c.realizations), format_number(c.log_avg_emin),
                    format_number(c.raw_avg_emin), std::to_string(c.emin_excluded), format_number(c.a_ratio),
                    format_number(two == a_at_two.end() ? kNaN : c.a_ratio / two->second)});
    if (spec.compute_sff)
      sff_table.row({std::to_string(c.N), format_number(c.mu), std::to_string(c.sff_used), std::to_string(c.sff_rejected),
                     std::to_string(c.degree_raised), format_number(c.tau_th), c.peak.found ? "1" : "0",
                     format_number(c.peak.tau_star), format_number(c.peak.k_peak), format_number(c.peak.k_ref),
                     format_number(c.tau_dip), format_number(c.frac_above_rmt), format_number(c.frac_signif_above_rmt),
                     format_number(c.plateau)});
  }
  write_text_file(spec.output_dir / "r_table.csv", r_table.str());
  write_text_file(spec.output_dir / "edge_table.csv", edge_table.str());
  if (spec.compute_sff) write_text_file(spec.output_dir / "sff_table.csv", sff_table.str());

  CsvTable eps_table({"mu", "eps", "eps_stderr", "n_sizes"});
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_mu;
  for (const CellSummary& c : cells) {
    if (!std::isfinite(c.log_avg_emin)) continue;
    by_mu[c.mu].first.push_back(c.N);
    by_mu[c.mu].second.push_back(c.log_avg_emin);
  }
  for (const auto& [mu, xy] : by_mu) {
    if (std::set<double>(xy.first.begin(), xy.first.end()).size() < 3) continue;
    const LinearFit fit = linear_fit(xy.first, xy.second);
    eps_table.row({format_number(mu), format_number(fit.slope), format_number(fit.slope_stderr), std::to_string(fit.n)});
  }
  write_text_file(spec.output_dir / "epsilon_table.csv", eps_table.str());
}

}  // namespace

SweepReport run_sweep(const EnsembleSpec& spec, std::ostream* log) {
  spec.validate();
  pin_solver_threads();
  fs::create_directories(spec.output_dir);
  fs::create_directories(spec.spectra_dir());

  struct Task {
    SykConfig config;
    fs::path path;
  };
  std::vector<int> sizes = spec.N_list;
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  std::vector<Task> tasks;
  for (int n : sizes)
    for (double mu : spec.mu_list)
      for (std::size_t i = 0; i < static_cast<std::size_t>(spec.realizations); ++i) {
        SykConfig c = cell_config(spec, n, mu, i);
        tasks.push_back({c, spec.spectra_dir() / spectrum_filename(make_meta(c))});
      }

  SweepReport report;
  std::atomic<std::size_t> computed{0}, hits{0}, mismatches{0}, done{0};
  std::mutex log_mutex;
  const std::size_t stride = std::max<std::size_t>(1, tasks.size() / 50);
  parallel_for(tasks.size(), spec.jobs, [&](std::size_t k) {
    const Task& task = tasks[k];
    const SpectrumMeta meta = make_meta(task.config);
    const std::size_t dim = sector_dimension(task.config.N / 2, task.config.effective_sector());
    if (load_cached_spectrum(task.path, meta, dim)) {
      ++hits;
    } else {
      std::error_code ec;
      if (fs::exists(task.path, ec)) {
        ++mismatches;
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << "warning: cached " << task.path.filename().string() << " does not match the requested metadata; recomputing\n";
        }
      }
      write_text_file(task.path, to_json(compute_spectrum(task.config)));
      ++computed;
    }
    const std::size_t d = ++done;
    if (log && (d % stride == 0 || d == tasks.size())) {
      std::lock_guard lock(log_mutex);
      *log << "spectra " << d << "/" << tasks.size() << " (computed " << computed.load() << ", cached " << hits.load()
           << ")\n";
    }
  });
  report.computed = computed;
  report.cache_hits = hits;
  report.cache_mismatches = mismatches;

  std::vector<std::pair<int, double>> cells;
  for (int n : spec.N_list)
    for (double mu : spec.mu_list) cells.emplace_back(n, mu);
  report.cells.resize(cells.size());
  parallel_for(cells.size(), spec.jobs, [&](std::size_t k) {
    report.cells[k] = summarize_cell(spec, cells[k].first, cells[k].second);
    if (log) {
      std::lock_guard lock(log_mutex);
      *log << "derived " << cell_name(cells[k].first, cells[k].second) << "\n";
    }
  });
  write_derived_tables(spec, report.cells);
  write_fit_tables(spec.output_dir, spec.r_threshold, spec.close_to_one);
  return report;
}

void write_fit_tables(const fs::path& dir, double r_threshold, double close_to_one) {
  const CsvTable r_table = CsvTable::parse(read_text_file(dir / "r_table.csv"));
  std::vector<RRow> r_rows;
  for (const auto& row : r_table.rows())
    r_rows.push_back({static_cast<int>(parse_integer(row[r_table.column("N")])), parse_real(row[r_table.column("mu")]),
                      parse_real(row[r_table.column("r_mean")])});

  CsvTable summary({"quantity", "variant", "value", "stderr", "n_points"});
  CsvTable mu_c_table({"threshold", "N", "mu_c"});
  std::set<double, std::greater<>> thresholds{r_threshold, kMainThreshold, kSupplementThreshold, 0.06, 0.12};
  for (double threshold : thresholds) {
    const MuCResult res = fit_mu_c(r_rows, threshold);
    for (std::size_t i = 0; i < res.n_values.size(); ++i)
      mu_c_table.row({format_number(threshold), std::to_string(res.n_values[i]), format_number(res.mu_c[i])});
    for (int n : res.excluded) mu_c_table.row({format_number(threshold), std::to_string(n), "nan"});
    summary.row({"eta1", "threshold=" + format_number(threshold), format_number(res.has_fit ? res.eta1 : kNaN),
                 format_number(res.has_fit ? res.fit.slope_stderr : kNaN), std::to_string(res.n_values.size())});
  }
  write_text_file(dir / "mu_c.csv", mu_c_table.str());

  std::error_code ec;
  if (fs::exists(dir / "sff_table.csv", ec)) {
    const CsvTable s_table = CsvTable::parse(read_text_file(dir / "sff_table.csv"));
    std::vector<ThoulessRow> th_rows;
    std::map<double, std::vector<PeakRow>> peaks;
    for (const auto& row : s_table.rows()) {
      const int n = static_cast<int>(parse_integer(row[s_table.column("N")]));
      const double mu = parse_real(row[s_table.column("mu")]);
      const double tau_th = parse_real(row[s_table.column("tau_th")]);
      if (std::isfinite(tau_th)) th_rows.push_back({n, mu, tau_th});
      if (row[s_table.column("peak_found")] == "1") peaks[mu].push_back({n, parse_real(row[s_table.column("tau_star")])});
    }
    CsvTable alpha_table({"mu", "alpha_mu", "alpha_mu_stderr"});
    CsvTable mu_c2_table({"bracket", "N", "mu_c2"});
    for (Bracket b : {Bracket::low, Bracket::mid, Bracket::high}) {
      const ThoulessScaling ts = fit_thouless_scaling(th_rows, b, close_to_one);
      if (b == Bracket::mid)
        for (std::size_t i = 0; i < ts.mu_values.size(); ++i)
          alpha_table.row({format_number(ts.mu_values[i]), format_number(ts.alpha_mu[i]), format_number(ts.alpha_mu_stderr[i])});
      for (std::size_t i = 0; i < ts.n_values.size(); ++i)
        mu_c2_table.row({to_string(b), std::to_string(ts.n_values[i]), format_number(ts.mu_c2[i])});
      for (int n : ts.excluded) mu_c2_table.row({to_string(b), std::to_string(n), "nan"});
      summary.row({"eta2", "bracket=" + to_string(b), format_number(ts.has_fit ? ts.eta2 : kNaN),
                   format_number(ts.has_fit ? ts.fit.slope_stderr : kNaN), std::to_string(ts.n_values.size())});
    }
    for (const auto& [mu, rows] : peaks) {
      std::set<int> sizes;
      for (const PeakRow& row : rows) sizes.insert(row.N);
      if (sizes.size() < 3) continue;
      const PeakScaling ps = fit_peak_scaling(rows);
      summary.row({"alpha_star", "mu=" + format_number(mu), format_number(ps.alpha_star), format_number(ps.fit.slope_stderr),
                   std::to_string(rows.size())});
    }
    write_text_file(dir / "thouless_fit.csv", alpha_table.str());
    write_text_file(dir / "mu_c2.csv", mu_c2_table.str());
  }
  write_text_file(dir / "fit_summary.csv", summary.str());
}

}  // namespace lsyk
