#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ebtest/numerics.hpp"

using namespace ebtest::numerics;

TEST(CompensatedSum, RecoversSmallTermsNextToLargeOnes) {
  std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(compensated_sum(v), 2.0);
}

TEST(CompensatedSum, EmptyIsZero) { EXPECT_EQ(compensated_sum({}), 0.0); }

TEST(Bisection, FindsSquareRootOfTwo) {
  const auto res = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.root, std::sqrt(2.0), 1e-13);
}

TEST(Bisection, HandlesDecreasingFunctions) {
  const auto res = bisect([](double x) { return 1.0 - x; }, 0.0, 3.0);
  EXPECT_NEAR(res.root, 1.0, 1e-13);
}

TEST(Bisection, RelativeWidthStopsEarlierForLargeRoots) {
  BisectionOptions opts;
  opts.abs_width = 0.0;
  opts.rel_width = 1e-6;
  const auto res = bisect([](double x) { return x - 1e6; }, 0.0, 4e6, opts);
  EXPECT_NEAR(res.root, 1e6, 2.0);
  EXPECT_LT(res.iterations, 40);
}

TEST(InvertDecreasing, ExpandsBracketBeyondTwo) {
  const double root = invert_decreasing_from_zero([](double x) { return 37.0 - x; });
  EXPECT_NEAR(root, 37.0, 1e-11);
}

TEST(Quadrature, PolynomialIsExact) {
  const auto res = integrate([](double x) { return 3.0 * x * x; }, 0.0, 2.0);
  EXPECT_NEAR(res.value, 8.0, 1e-13);
}

TEST(Quadrature, GaussianMassOnWideInterval) {
  const auto f = [](double x) { return std::exp(-x * x / 2.0) / std::sqrt(2.0 * M_PI); };
  EXPECT_NEAR(integrate(f, -40.0, 40.0).value, 1.0, 1e-12);
}

TEST(Quadrature, PiecesAddUp) {
  const std::vector<double> br{0.0, 0.5, 1.0, 3.0};
  const auto res = integrate_pieces([](double x) { return std::cos(x); }, br);
  EXPECT_NEAR(res.value, std::sin(3.0), 1e-13);
}

TEST(Quadrature, PeakedIntegrand) {
  const auto res = integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0);
  EXPECT_NEAR(res.value, 2.0 * std::atan(1.0 / 1e-2) / 1e-2, 1e-8);
}

TEST(LogAddExp, MatchesDirectFormulaAndInfinities) {
  EXPECT_NEAR(log_add_exp(std::log(2.0), std::log(3.0)), std::log(5.0), 1e-15);
  const double ninf = -std::numeric_limits<double>::infinity();
  EXPECT_EQ(log_add_exp(ninf, 1.5), 1.5);
  EXPECT_EQ(log_add_exp(1.5, ninf), 1.5);
  EXPECT_EQ(log_add_exp(ninf, ninf), ninf);
  EXPECT_NEAR(log_add_exp(1000.0, 1000.0), 1000.0 + std::log(2.0), 1e-12);
}

TEST(LogisticComplement, NoOverflow) {
  EXPECT_NEAR(logistic_complement(0.0), 0.5, 1e-16);
  EXPECT_EQ(logistic_complement(1000.0), 0.0);
  EXPECT_EQ(logistic_complement(-1000.0), 1.0);
  EXPECT_NEAR(logistic_complement(-3.0), 1.0 / (1.0 + std::exp(-3.0)), 1e-16);
}
