#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
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
#include "lsyk/sfd.hpp"
#include "lsyk/spectral.hpp"
#include "lsyk/stable.hpp"
#include "lsyk/syk.hpp"

namespace fs = std::filesystem;
using namespace lsyk;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
};

// Output goes to --out when given, stdout otherwise.
void emit(const Globals& g, const std::string& text, const std::string& default_name = "") {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  fs::path path = g.out;
  if (fs::is_directory(path) && !default_name.empty()) path /= default_name;
  write_text_file(path, text);
  std::cerr << "wrote " << path.string() << "\n";
}

std::vector<Spectrum> load_spectra(const std::vector<std::string>& inputs) {
  std::vector<Spectrum> out;
  for (const std::string& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(in))
        if (e.path().extension() == ".json") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) out.push_back(spectrum_from_json(read_text_file(f)));
    } else {
      out.push_back(spectrum_from_json(read_text_file(in)));
    }
  }
  require(!out.empty(), "no spectra given");
  return out;
}

Spectrum prepared(const Spectrum& s) {
  if (s.meta.symmetry == SymmetryClass::GSE && s.meta.deformation == Deformation::none && !s.meta.kramers_deduped)
    return dedupe_kramers(s);
  return s;
}

struct ModelArgs {
  int N = 16;
  int q = 4;
  double J = 1.0;
  double mu = 2.0;
  std::uint64_t seed = 1;
  std::string deformation = "none";
  int defect_site = 1;
  std::string sector = "even";

  void add(CLI::App* app) {
    app->add_option("-N,--fermions", N, "number of Majorana fermions (even)");
    app->add_option("-q,--body", q, "interaction order");
    app->add_option("-J,--coupling", J, "coupling scale");
    app->add_option("--mu", mu, "stability index in (0, 2]");
    app->add_option("--deformation", deformation, "none | defect | mass");
    app->add_option("--defect-site", defect_site, "site of the single-Majorana defect");
    app->add_option("--sector", sector, "even | odd | full");
  }
  SykConfig config(std::uint64_t s) const {
    SykConfig c;
    c.N = N;
    c.q = q;
    c.J = J;
    c.mu = mu;
    c.seed = s;
    c.deformation = parse_deformation(deformation);
    c.defect_site = defect_site;
    c.sector = parse_sector(sector);
    c.validate();
    return c;
  }
};

EnsembleSpec load_spec(const Globals& g) {
  EnsembleSpec spec = g.config.empty() ? EnsembleSpec{} : EnsembleSpec::from_key_values(parse_key_values(read_text_file(g.config)));
  if (g.seed) spec.base_seed = *g.seed;
  if (g.jobs) spec.jobs = *g.jobs;
  if (!g.out.empty()) spec.output_dir = g.out;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact diagonalization of the Levy SYK model and its spectral statistics"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "flat key = value ensemble file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file or directory");

  ModelArgs model;
  std::size_t count = 1;

  auto* sample = app.add_subcommand("sample", "draw coupling tensors as JSON");
  model.add(sample);
  sample->add_option("--count", count, "number of realizations");

  auto* spectrum = app.add_subcommand("spectrum", "build, diagonalize and persist one spectrum per realization");
  model.add(spectrum);
  spectrum->add_option("--count", count, "number of realizations");
  bool check_residual = false;
  spectrum->add_flag("--check-residual", check_residual, "verify ||Hv - lambda v|| per eigenpair");

  std::vector<std::string> inputs;
  double window = 1.0 / 3.0;
  auto* rstat = app.add_subcommand("rstat", "mean spacing ratio of spectrum files");
  rstat->add_option("inputs", inputs, "spectrum JSON files or directories")->required();
  rstat->add_option("--window", window, "central fraction of levels used");

  double eta = 0.3;
  int degree = 6, max_degree = 24;
  double tau_lo = 1e-4, tau_hi = 10.0;
  std::size_t tau_points = 2000, smoothing = 100;
  double th_threshold = 0.1;
  auto* sff_cmd = app.add_subcommand("sff", "spectral form factor of an ensemble of spectrum files");
  sff_cmd->add_option("inputs", inputs, "spectrum JSON files or directories")->required();
  sff_cmd->add_option("--eta", eta, "Gaussian filter width in units of the spectral std");
  sff_cmd->add_option("--degree", degree, "first unfolding polynomial degree");
  sff_cmd->add_option("--max-degree", max_degree, "highest unfolding degree tried");
  sff_cmd->add_option("--tau-lo", tau_lo);
  sff_cmd->add_option("--tau-hi", tau_hi);
  sff_cmd->add_option("--tau-points", tau_points);
  sff_cmd->add_option("--smoothing", smoothing, "moving-average window in grid points");
  sff_cmd->add_option("--threshold", th_threshold, "Thouless-time deviation threshold");

  auto* edge = app.add_subcommand("edge", "ground-state statistics of spectrum files");
  edge->add_option("inputs", inputs, "spectrum JSON files or directories")->required();

  int z_bins = 8;
  bool perturbative = false;
  auto* hierarchy = app.add_subcommand("hierarchy", "coupling hierarchy census, outlier ratio and perturbative spectrum");
  model.add(hierarchy);
  hierarchy->add_option("--bins", z_bins, "census bins in z");
  hierarchy->add_flag("--perturbative", perturbative, "compare the second-order spectrum against exact diagonalization");

  double a = 0.5, b = 0.75, r = 1.0;
  auto* sfd_cmd = app.add_subcommand("sfd", "closed-form level-spacing SFD pipeline");
  sfd_cmd->add_option("--mu", model.mu, "stability index in (0, 2)");
  sfd_cmd->add_option("-a", a, "coupling count exponent");
  sfd_cmd->add_option("-b", b, "extensive sum exponent");
  sfd_cmd->add_option("-r", r, "power of the Levy coupling in L^r");

  auto* sweep = app.add_subcommand("sweep", "ensemble sweep over (N, mu, seed) with cached spectra");

  std::string fit_dir;
  double r_threshold = kMainThreshold;
  double close_to_one = 0.9;
  auto* fit = app.add_subcommand("fit", "crossover fits from r_table.csv and sff_table.csv");
  fit->add_option("dir", fit_dir, "sweep output directory")->required()->check(CLI::ExistingDirectory);
  fit->add_option("--r-threshold", r_threshold, "relative r deviation defining mu_c");
  fit->add_option("--close-to-one", close_to_one, "tau_Th level defining mu_c2");

  CLI11_PARSE(app, argc, argv);

  try {
    pin_solver_threads();
    const std::uint64_t seed = g.seed.value_or(1);
    if (sample->parsed()) {
      std::ostringstream os;
      for (std::size_t i = 0; i < count; ++i) {
        const SykConfig c = model.config(realization_seed(seed, i));
        const CouplingTensor t = sample_couplings(c.N, c.q, c.J, c.mu, c.seed);
        if (g.out.empty()) {
          os << to_json(t) << "\n";
        } else {
          fs::create_directories(g.out);
          write_text_file(fs::path(g.out) / ("couplings_N" + std::to_string(c.N) + "_mu" + format_number(c.mu) + "_s" +
                                             std::to_string(c.seed) + ".json"),
                          to_json(t));
        }
      }
      if (g.out.empty()) std::cout << os.str();
    } else if (spectrum->parsed()) {
      const fs::path dir = g.out.empty() ? fs::path("spectra") : fs::path(g.out);
      fs::create_directories(dir);
      EigenOptions opts;
      opts.check_residual = check_residual;
      for (std::size_t i = 0; i < count; ++i) {
        const SykConfig c = model.config(realization_seed(seed, i));
        const CouplingTensor t = sample_couplings(c.N, c.q, c.J, c.mu, c.seed);
        const Spectrum s = full_spectrum(build_hamiltonian(c, t), make_meta(c), opts);
        const fs::path path = dir / spectrum_filename(s.meta);
        write_text_file(path, to_json(s));
        std::cout << path.string() << "\n";
      }
    } else if (rstat->parsed()) {
      CsvTable table({"N", "mu", "seed", "class", "r_mean", "n_ratios", "zero_spacings"});
      std::vector<double> rs;
      for (const Spectrum& raw : load_spectra(inputs)) {
        const Spectrum s = prepared(raw);
        const RStatistic st = r_statistic(s.eigenvalues, window);
        rs.push_back(st.mean);
        table.row({std::to_string(s.meta.N), format_number(s.meta.mu), std::to_string(s.meta.seed), to_string(s.meta.symmetry),
                   format_number(st.mean), std::to_string(st.n_ratios), std::to_string(st.zero_spacings)});
      }
      const EnsembleStats stats = summarize_r(rs, window);
      emit(g, table.str(), "rstat.csv");
      std::cerr << "<r> = " << format_number(stats.mean_r) << " +- " << format_number(stats.stderr_r) << " over " << rs.size()
                << " spectra\n";
    } else if (sff_cmd->parsed()) {
      std::vector<UnfoldedSpectrum> unfolded;
      std::optional<SymmetryClass> cls;
      std::size_t unfold_rejected = 0;
      for (const Spectrum& raw : load_spectra(inputs)) {
        const Spectrum s = prepared(raw);
        require(!cls || *cls == s.meta.symmetry, "sff: spectra must share one symmetry class");
        cls = s.meta.symmetry;
        std::optional<UnfoldedSpectrum> u = unfold_adaptive(s.eigenvalues, {degree, max_degree, 0.9, 0.02});
        if (u) unfolded.push_back(std::move(*u));
        else ++unfold_rejected;
      }
      const std::vector<double> tau = log_tau_grid(tau_lo, tau_hi, tau_points);
      const SffCurve c = sff(unfolded, eta, tau, *cls, std::min(smoothing, tau.size()));
      CsvTable table({"tau", "K", "K_dc", "K_c", "K_c_smooth", "K_c_smooth_stderr", "K_rmt", "K_rmt_smooth"});
      for (std::size_t t = 0; t < tau.size(); ++t)
        table.row({format_number(tau[t]), format_number(c.k_full[t]), format_number(c.k_disconnected[t]),
                   format_number(c.k_connected[t]), format_number(c.k_connected_smooth[t]),
                   format_number(c.k_connected_smooth_stderr[t]), format_number(c.k_rmt[t]), format_number(c.k_rmt_smooth[t])});
      emit(g, table.str(), "sff.csv");
      const double tau_th = thouless_time(tau, c.k_connected_smooth, c.k_rmt_smooth, th_threshold);
      const double tau_dip = sff_dip(c);
      const SffPeak peak = sff_peak(tau, c.k_connected_smooth, c.k_rmt_smooth, tau_dip, tau_th);
      std::cerr << "realizations " << c.n_realizations << " (rejected " << c.n_rejected + unfold_rejected << "), tau_dip = "
                << format_number(tau_dip) << ", tau_Th = " << format_number(tau_th);
      if (peak.found) std::cerr << ", peak at tau* = " << format_number(peak.tau_star);
      std::cerr << "\n";
    } else if (edge->parsed()) {
      std::vector<double> e1, e2;
      for (const Spectrum& raw : load_spectra(inputs)) {
        const Spectrum s = prepared(raw);
        e1.push_back(s.eigenvalues.at(0));
        e2.push_back(s.eigenvalues.at(1));
      }
      CsvTable table({"quantity", "value"});
      const GroundStateStats gs = ground_state_stats(e1);
      table.row({"log_avg_Emin", format_number(gs.log_avg)});
      table.row({"raw_avg_Emin", format_number(gs.raw_avg)});
      table.row({"excluded", std::to_string(gs.n_excluded)});
      table.row({"excess_kurtosis", format_number(excess_kurtosis(e1))});
      if (e1.size() >= 30) table.row({"A", format_number(a_ratio(e1, e2))});
      emit(g, table.str(), "edge.csv");
    } else if (hierarchy->parsed()) {
      const SykConfig c = model.config(seed);
      const CouplingTensor t = sample_couplings(c.N, c.q, c.J, c.mu, c.seed);
      std::ostringstream os;
      if (c.mu < 2.0) {
        const std::vector<CensusBin> bins = hierarchy_census(t, z_bins);
        CsvTable table({"z_lo", "z_hi", "predicted", "observed"});
        for (const CensusBin& bin : bins)
          table.row({format_number(bin.z_lo), format_number(bin.z_hi), format_number(bin.predicted), std::to_string(bin.observed)});
        os << table.str();
        std::cerr << "census slope " << format_number(census_slope(bins)) << ", log of term count "
                  << format_number(std::log(static_cast<double>(t.values.size()))) << "\n";
      }
      std::cerr << "outlier ratio |J1| / sum|J_rest| = " << format_number(outlier_ratio(t.values)) << "\n";
      if (perturbative) {
        // Relabeling to the occupation basis needs the bare tensor; deformed models use the generic basis.
        const PerturbativeResult pr = c.deformation == Deformation::none
                                          ? perturbative_spectrum(t, c.sector)
                                          : perturbative_spectrum(hamiltonian_terms(c, t), Sector::full, c.N);
        std::cerr << "largest cluster " << pr.largest_cluster << ", skipped pairs " << pr.skipped_pairs << "\n";
        const Spectrum exact = full_spectrum(build_hamiltonian(c, t), make_meta(c));
        CsvTable table({"index", "exact", "perturbative"});
        for (std::size_t i = 0; i < pr.estimates.size(); ++i)
          table.row({std::to_string(i), format_number(exact.eigenvalues[i]), format_number(pr.estimates[i])});
        os << table.str();
      }
      emit(g, os.str(), "hierarchy.csv");
    } else if (sfd_cmd->parsed()) {
      const LevelSpacingStages st = sfd_level_spacing_stages(model.mu, a, b, r);
      std::ostringstream os;
      os << "{\"levy\": " << to_json(st.levy) << ", \"levy_sq\": " << to_json(st.levy_sq) << ", \"diagonal\": "
         << to_json(st.diagonal) << ", \"ratio\": " << to_json(st.ratio) << ", \"mixed\": " << to_json(st.mixed)
         << ", \"extensive\": " << to_json(st.extensive) << ", \"energy\": " << to_json(st.energy)
         << ", \"spacing\": " << to_json(st.spacing) << "}\n";
      emit(g, os.str(), "sfd.json");
    } else if (sweep->parsed()) {
      const EnsembleSpec spec = load_spec(g);
      const SweepReport rep = run_sweep(spec, &std::cerr);
      std::cerr << "computed " << rep.computed << ", cache hits " << rep.cache_hits << ", stale " << rep.cache_mismatches << "\n";
    } else if (fit->parsed()) {
      write_fit_tables(fit_dir, r_threshold, close_to_one);
      std::cout << read_text_file(fs::path(fit_dir) / "fit_summary.csv");
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
