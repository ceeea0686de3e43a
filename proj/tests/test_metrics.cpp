// SPDX-License-Identifier: Apache-2.0

#include "qed/metrics.hpp"

#include <gtest/gtest.h>

#include "qed/distributions.hpp"

namespace qed {
namespace {

MassFunction two_atoms(double m1, double m2) {
  return MassFunction(Grid::univariate({1.0, 2.0}), {m1, m2});
}

TEST(Chebyshev, ZeroAgainstItsOwnCdf) {
  MassFunction p = two_atoms(0.4, 0.6);
  StepCdf f(p);
  double d = chebyshev(p, [&](double x) { return f.value(x); });
  EXPECT_NEAR(d, 0.0, 1e-12);
}

TEST(Chebyshev, DisjointPointMassesDistanceOne) {
  MassFunction a(Grid::univariate({0.0}), {1.0});
  MassFunction b(Grid::univariate({1.0}), {1.0});
  EXPECT_DOUBLE_EQ(chebyshev(a, b), 1.0);
}

TEST(Chebyshev, LeftLimitCapturesJumpGap) {
  // Masses {1: .5, 2: .5} against Uniform(0,2): the sup (0.5) sits at the
  // left limit of the atom at 1.
  MassFunction p = two_atoms(0.5, 0.5);
  auto u02 = [](double x) { return std::min(1.0, std::max(0.0, x / 2.0)); };
  EXPECT_NEAR(chebyshev(p, u02), 0.5, 1e-12);
}

TEST(Chebyshev, ExplicitEvalPoints) {
  MassFunction p = two_atoms(0.5, 0.5);
  auto u02 = [](double x) { return std::min(1.0, std::max(0.0, x / 2.0)); };
  std::vector<double> pts{1.5};
  EXPECT_NEAR(chebyshev(p, u02, pts), 0.25, 1e-12);
  EXPECT_THROW(chebyshev(p, u02, std::span<const double>{}),
               std::invalid_argument);
}

TEST(Chebyshev, StepVsStepSymmetric) {
  MassFunction a = two_atoms(0.3, 0.7);
  MassFunction b(Grid::univariate({0.5, 1.7, 2.0}), {0.2, 0.5, 0.3});
  EXPECT_DOUBLE_EQ(chebyshev(a, b), chebyshev(b, a));
}

TEST(Chebyshev, MultivariateMatchesUnivariateOnProduct) {
  MassFunction p = two_atoms(0.5, 0.5);
  auto u02 = [](double x) { return std::min(1.0, std::max(0.0, x / 2.0)); };
  double d1 = chebyshev(p, u02);
  Grid g2({{1.0, 2.0}, {0.0}});
  MassFunction p2(g2, {0.5, 0.5});
  double d2 = chebyshev_md(p2, [&](std::span<const double> x) {
    return x[1] >= 0.0 ? u02(x[0]) : 0.0;
  });
  EXPECT_NEAR(d1, d2, 1e-12);
}

TEST(QuantileError, RatioAndGuards) {
  MassFunction p(Grid::univariate({9.0}), {1.0});
  EXPECT_DOUBLE_EQ(quantile_error(p, 10.0, 0.5), 0.9);
  EXPECT_DOUBLE_EQ(quantile_error(p, 9.0, 0.5), 1.0);
  EXPECT_THROW(quantile_error(p, 0.0, 0.5), std::invalid_argument);
}

TEST(Bands, IdenticalReplicationsCollapse) {
  std::vector<std::vector<double>> rows{{0.1, 0.5, 0.9}, {0.1, 0.5, 0.9}};
  Bands b = bands(rows, 0.1);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_DOUBLE_EQ(b.lower[j], rows[0][j]);
    EXPECT_DOUBLE_EQ(b.mean[j], rows[0][j]);
    EXPECT_DOUBLE_EQ(b.upper[j], rows[0][j]);
  }
}

TEST(Bands, TinyAlphaGivesMinMax) {
  std::vector<std::vector<double>> rows{{0.2, 0.6}, {0.4, 0.4}};
  Bands b = bands(rows, 1e-9);
  EXPECT_DOUBLE_EQ(b.lower[0], 0.2);
  EXPECT_DOUBLE_EQ(b.upper[0], 0.4);
  EXPECT_DOUBLE_EQ(b.lower[1], 0.4);
  EXPECT_DOUBLE_EQ(b.upper[1], 0.6);
  EXPECT_DOUBLE_EQ(b.mean[0], 0.3);
}

TEST(Bands, OrderingLowerMeanUpper) {
  Rng rng(3);
  std::vector<std::vector<double>> rows(50, std::vector<double>(20));
  for (auto& r : rows) {
    for (auto& v : r) v = rng.uniform01();
  }
  Bands b = bands(rows, 0.1);
  for (std::size_t j = 0; j < 20; ++j) {
    EXPECT_LE(b.lower[j], b.mean[j] + 1e-12);
    EXPECT_LE(b.mean[j], b.upper[j] + 1e-12);
  }
}

TEST(Bands, MismatchedAtomsThrow) {
  std::vector<std::vector<double>> rows{{0.1, 0.5}, {0.1}};
  EXPECT_THROW(bands(rows, 0.1), std::invalid_argument);
  std::vector<std::vector<double>> one{{0.1}};
  EXPECT_THROW(bands(one, 0.1), std::invalid_argument);
}

TEST(Summary, QuantileColumnsOrdered) {
  std::vector<ReplicationReport> reps;
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    ReplicationReport r;
    r.rho = rng.uniform01();
    r.delta[0.5] = 0.9 + 0.2 * rng.uniform01();
    reps.push_back(r);
  }
  SummaryRow row = summarize("test", reps);
  EXPECT_LE(row.rho_q01, row.rho_q99);
  EXPECT_LE(row.delta_q01, row.delta_q99);
  EXPECT_NEAR(row.rho_mean, 0.5, 0.05);
  EXPECT_NEAR(row.delta_mean, 1.0, 0.02);
}

}  // namespace
}  // namespace qed
