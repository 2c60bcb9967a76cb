#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "lsyk/eigensolver.hpp"
#include "lsyk/hierarchy.hpp"
#include "lsyk/rng.hpp"
#include "lsyk/sfd.hpp"
#include "lsyk/spectral.hpp"
#include "lsyk/stable.hpp"
#include "lsyk/syk.hpp"

using namespace lsyk;

namespace {

SykConfig config(int n, double mu) {
  SykConfig c;
  c.N = n;
  c.mu = mu;
  c.seed = 7;
  return c;
}

void BM_SampleCouplings(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_couplings(n, 4, 1.0, 1.0, ++seed));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(binomial(n, 4)));
}
BENCHMARK(BM_SampleCouplings)->DenseRange(14, 22, 4);

void BM_BuildHamiltonian(benchmark::State& state) {
  const SykConfig c = config(static_cast<int>(state.range(0)), 1.0);
  const CouplingTensor t = sample_couplings(c.N, 4, 1.0, 1.0, c.seed);
  for (auto _ : state) benchmark::DoNotOptimize(build_hamiltonian(c, t));
}
BENCHMARK(BM_BuildHamiltonian)->DenseRange(14, 22, 2)->Unit(benchmark::kMillisecond);

// N mod 8 picks the real or complex solver path.
void BM_FullSpectrum(benchmark::State& state) {
  pin_solver_threads();
  const SykConfig c = config(static_cast<int>(state.range(0)), 1.0);
  const HermitianMatrix h = build_hamiltonian(c, sample_couplings(c.N, 4, 1.0, 1.0, c.seed));
  const SpectrumMeta meta = make_meta(c);
  for (auto _ : state) benchmark::DoNotOptimize(full_spectrum(h, meta));
}
BENCHMARK(BM_FullSpectrum)->DenseRange(14, 22, 2)->Unit(benchmark::kMillisecond);

void BM_RStatistic(benchmark::State& state) {
  CounterRng rng(3);
  std::vector<double> levels(static_cast<std::size_t>(state.range(0)));
  for (double& v : levels) v = rng.uniform_open();
  std::sort(levels.begin(), levels.end());
  for (auto _ : state) benchmark::DoNotOptimize(r_statistic(levels));
}
BENCHMARK(BM_RStatistic)->Range(1 << 8, 1 << 12);

void BM_Sff(benchmark::State& state) {
  CounterRng rng(4);
  std::vector<UnfoldedSpectrum> ensemble;
  for (int r = 0; r < state.range(0); ++r) {
    std::vector<double> levels(1024);
    for (double& v : levels) v = rng.uniform_open();
    std::sort(levels.begin(), levels.end());
    ensemble.push_back(unfold(levels));
  }
  const auto tau = log_tau_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sff(ensemble, 0.3, tau, SymmetryClass::GUE, 100));
}
BENCHMARK(BM_Sff)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SfdLevelSpacing(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sfd_level_spacing(1.2, 0.5, 0.7));
}
BENCHMARK(BM_SfdLevelSpacing);

void BM_Perturbative(benchmark::State& state) {
  const CouplingTensor t = sample_couplings(static_cast<int>(state.range(0)), 4, 1.0, 0.4, 11);
  for (auto _ : state) benchmark::DoNotOptimize(perturbative_spectrum(t, Sector::even));
}
BENCHMARK(BM_Perturbative)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
