#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lsyk/errors.hpp"
#include "lsyk/rng.hpp"
#include "lsyk/stable.hpp"

using namespace lsyk;

namespace {

std::vector<double> draws(double mu, double sigma, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  const StableParams p(mu, sigma);
  std::vector<double> out(n);
  for (double& x : out) x = sample_stable(p, rng);
  return out;
}

double quantile(std::vector<double> v, double p) {
  const auto k = static_cast<std::ptrdiff_t>(p * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[static_cast<std::size_t>(k)];
}

}  // namespace

// Values from an independent bignum SplitMix64 implementation.
TEST(CounterRng, FrozenStream) {
  EXPECT_EQ(derive_seed(1, 0), 5199774590669546748ULL);
  EXPECT_EQ(derive_seed(1, 1), 4158004636484536377ULL);
  EXPECT_EQ(derive_seed(12345, 7), 17162858991451819843ULL);
  CounterRng rng(42);
  EXPECT_EQ(rng(), 13679457532755275413ULL);
  EXPECT_EQ(rng(), 2949826092126892291ULL);
  EXPECT_EQ(rng(), 5139283748462763858ULL);
  EXPECT_EQ(rng.counter(), 3u);
}

TEST(CounterRng, UniformOpenStaysInside) {
  CounterRng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(StableParams, RejectsOutOfRange) {
  EXPECT_THROW(StableParams(0.0, 1.0), ParameterError);
  EXPECT_THROW(StableParams(2.1, 1.0), ParameterError);
  EXPECT_THROW(StableParams(1.0, 0.0), ParameterError);
  EXPECT_NO_THROW(StableParams(2.0, 1.0));
}

TEST(SampleStable, GaussianLimitVariance) {
  const auto x = draws(2.0, 1.0 / std::numbers::sqrt2, 1000000, 11);
  double s2 = 0.0;
  for (double v : x) s2 += v * v;
  EXPECT_NEAR(s2 / static_cast<double>(x.size()), 1.0, 0.02);
}

TEST(SampleStable, CauchyQuartiles) {
  const auto x = draws(1.0, 1.0, 400000, 12);
  EXPECT_NEAR(quantile(x, 0.5), 0.0, 0.01);
  const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
  EXPECT_NEAR(iqr, 2.0, 0.06);
}

TEST(SampleStable, GaussianLimitKolmogorovSmirnov) {
  const double sigma = 0.8;
  auto x = draws(2.0, sigma, 100000, 13);
  std::sort(x.begin(), x.end());
  const double sd = std::sqrt(2.0) * sigma;
  double d = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-x[i] / (sd * std::numbers::sqrt2));
    d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(d, 0.01);
}

TEST(SampleStable, SignSymmetry) {
  for (double mu : {0.3, 0.7, 1.0, 1.5, 2.0}) {
    const auto x = draws(mu, 1.0, 100000, 14);
    double s = 0.0;
    for (double v : x) s += (v > 0) - (v < 0);
    EXPECT_LT(std::abs(s) / std::sqrt(static_cast<double>(x.size())), 3.0) << "mu=" << mu;
  }
}

TEST(SampleStable, ScaleEquivariance) {
  for (double mu : {0.5, 1.0, 1.7, 2.0}) {
    const auto unit = draws(mu, 1.0, 1000, 15);
    const auto scaled = draws(mu, 3.5, 1000, 15);
    for (std::size_t i = 0; i < unit.size(); ++i) ASSERT_NEAR(scaled[i], 3.5 * unit[i], 1e-12 * std::abs(scaled[i]) + 1e-300);
  }
}

TEST(SampleStable, SmallMuStaysFinite) {
  const auto x = draws(0.1, 1.0, 100000, 16);
  for (double v : x) ASSERT_FALSE(std::isnan(v));
}

TEST(SampleStable, TailLawSlope) {
  for (double mu : {0.5, 1.0, 1.5}) {
    auto x = draws(mu, 1.0, 1000000, 17);
    for (double& v : x) v = std::abs(v);
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    // survival fraction at the 1e-2 and 1e-4 upper quantiles
    const double x1 = x[static_cast<std::size_t>(n * (1.0 - 1e-2))];
    const double x2 = x[static_cast<std::size_t>(n * (1.0 - 1e-4))];
    const double slope = -std::log(1e-2 / 1e-4) / std::log(x2 / x1);
    EXPECT_NEAR(-slope, mu, 0.1 * mu) << "mu=" << mu;
  }
}

TEST(TailIndex, HillRecoversMu) {
  const struct {
    double mu, lo, hi;
  } cases[] = {{0.5, 0.45, 0.55}, {1.0, 0.93, 1.07}, {1.5, 1.38, 1.62}};
  for (const auto& c : cases) {
    const auto x = draws(c.mu, 1.0, 1000000, 18);
    const double est = tail_index_estimate(x, 10000);
    EXPECT_GE(est, c.lo) << "mu=" << c.mu;
    EXPECT_LE(est, c.hi) << "mu=" << c.mu;
  }
}

TEST(TailIndex, Errors) {
  const std::vector<double> x(100, 2.0);
  EXPECT_THROW(tail_index_estimate(x, 0), ParameterError);
  EXPECT_THROW(tail_index_estimate(x, 100), ParameterError);
  EXPECT_THROW(tail_index_estimate(x, 10), NumericalError);
}

TEST(Combinations, RankUnrankBijection) {
  const int n = 10, q = 4;
  std::vector<int> t{1, 2, 3, 4};
  std::uint64_t rank = 0;
  do {
    ASSERT_EQ(combination_rank(t, n), rank);
    ASSERT_EQ(combination_unrank(rank, n, q), t);
    ++rank;
  } while (next_combination(t, n));
  EXPECT_EQ(rank, binomial(n, q));
  EXPECT_EQ(binomial(30, 4), 27405u);
  EXPECT_EQ(binomial(4, 4), 1u);
}

// Reference values from a direct (non-log-space) evaluation of the CMS formula.
TEST(SampleCouplings, FrozenValues) {
  const struct {
    double mu, v0, v1, v69;
  } cases[] = {
      {1.5, -0.042843744576069646, 0.09417933802088012, -0.010838735499862192},
      {1.0, -0.0042260912960851785, 0.03636204824312385, -0.0014584091366096038},
      {2.0, -0.14848594151756675, 0.15138542392252605, -0.03216771956316576},
      {0.5, -6.440607586303553e-06, 0.0012870102757283257, -5.9496329377646905e-06},
  };
  for (const auto& c : cases) {
    const CouplingTensor t = sample_couplings(8, 4, 1.0, c.mu, 7);
    ASSERT_EQ(t.values.size(), 70u);
    EXPECT_NEAR(t.values[0], c.v0, 1e-12 * std::abs(c.v0));
    EXPECT_NEAR(t.values[1], c.v1, 1e-12 * std::abs(c.v1));
    EXPECT_NEAR(t.values[69], c.v69, 1e-12 * std::abs(c.v69));
  }
}

TEST(SampleCouplings, SizesAndDeterminism) {
  EXPECT_EQ(sample_couplings(4, 4, 1.0, 1.5, 1).values.size(), 1u);
  const auto a = sample_couplings(12, 4, 1.0, 0.8, 99);
  const auto b = sample_couplings(12, 4, 1.0, 0.8, 99);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.seed, 99u);
  const std::vector<int> tuple{2, 5, 7, 11};
  EXPECT_EQ(a.at(tuple), a.values[combination_rank(tuple, 12)]);
}

TEST(SampleCouplings, GaussianSecondMoment) {
  double s2 = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    for (double v : sample_couplings(8, 4, 1.0, 2.0, derive_seed(5, seed)).values) {
      s2 += v * v;
      ++n;
    }
  const double expected = 2.0 * 6.0 / 512.0;
  EXPECT_NEAR(s2 / static_cast<double>(n), expected, 0.3 * expected);
}

TEST(SampleCouplings, Validation) {
  EXPECT_THROW(sample_couplings(7, 4, 1.0, 1.0, 1), ParameterError);
  EXPECT_THROW(sample_couplings(8, 3, 1.0, 1.0, 1), ParameterError);
  EXPECT_THROW(sample_couplings(8, 10, 1.0, 1.0, 1), ParameterError);
  EXPECT_THROW(sample_couplings(8, 4, 1.0, 2.5, 1), ParameterError);
  EXPECT_THROW(sample_couplings(8, 4, -1.0, 1.0, 1), ParameterError);
  EXPECT_NEAR(coupling_scale(8, 4, 1.0, 2.0), std::sqrt(6.0 / 512.0), 1e-15);
}
