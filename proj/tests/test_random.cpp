#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <set>
#include <vector>

#include "ebtest/random.hpp"
#include "oracles.hpp"

using namespace ebtest;

TEST(NormalQuantile, MatchesBoostQuantile) {
  const boost::math::normal_distribution<long double> nd;
  for (double p : oracle::logspace(-300.0, std::log10(0.5), 200)) {
    const double want = static_cast<double>(boost::math::quantile(nd, static_cast<long double>(p)));
    EXPECT_LT(oracle::rel_err(normal_quantile(p), want), 1e-14) << "p=" << p;
    const double upper = 1.0 - p;
    if (upper < 1.0) {
      const double want_upper =
          static_cast<double>(boost::math::quantile(nd, static_cast<long double>(upper)));
      EXPECT_LT(oracle::rel_err(normal_quantile(upper), want_upper), 1e-12) << "1-p, p=" << p;
    }
  }
  for (double p = 0.01; p < 1.0; p += 0.01) {
    const double want = static_cast<double>(boost::math::quantile(nd, static_cast<long double>(p)));
    EXPECT_NEAR(normal_quantile(p), want, 1e-15 * std::max(1.0, std::abs(want)) + 1e-16) << p;
  }
}

TEST(NormalQuantile, Endpoints) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_TRUE(std::isinf(normal_quantile(0.0)) && normal_quantile(0.0) < 0.0);
  EXPECT_TRUE(std::isinf(normal_quantile(1.0)) && normal_quantile(1.0) > 0.0);
}

TEST(SubstreamSeed, DistinctAndDeterministic) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(substream_seed(7, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_EQ(substream_seed(7, 3), substream_seed(7, 3));
  EXPECT_NE(substream_seed(7, 3), substream_seed(8, 3));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differs |= x != c.normal();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformOpenInterval) {
  Rng rng(1);
  double sum = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double u = rng.uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / N, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / N));
}

TEST(Rng, NormalMoments) {
  Rng rng(9);
  const int N = 400000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < N; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / N, 0.0, 4.0 / std::sqrt(N));
  EXPECT_NEAR(s2 / N, 1.0, 4.0 * std::sqrt(2.0 / N));
}

TEST(Rng, UniformIndexCoversRange) {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  const int N = 70000;
  for (int i = 0; i < N; ++i) {
    const auto k = rng.uniform_index(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, N / 7.0, 4.0 * std::sqrt(N / 7.0));
  EXPECT_EQ(rng.uniform_index(1), 0u);
}
