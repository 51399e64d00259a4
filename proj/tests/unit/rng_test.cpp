#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "compete/rng.hpp"

using compete::RngStream;

TEST(Rng, SameSeedAndStreamRepeat) {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, StreamsDiffer) {
  RngStream a(42, 7);
  RngStream b(42, 8);
  RngStream c(43, 7);
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    same_ab += x == b() ? 1 : 0;
    same_ac += x == c() ? 1 : 0;
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(Rng, SplitIsPure) {
  RngStream parent(1, 2);
  const RngStream c1 = parent.split(5);
  parent();  // advancing the parent must not change its children
  RngStream c2 = parent.split(5);
  RngStream c1m = c1;
  for (int i = 0; i < 100; ++i) ASSERT_EQ(c1m(), c2());
}

TEST(Rng, StreamIdIsOrderSensitive) {
  EXPECT_NE(compete::stream_id({1, 2}), compete::stream_id({2, 1}));
  EXPECT_EQ(compete::stream_id({1, 2}), compete::stream_id({1, 2}));
}

TEST(Rng, HashNameKnownValue) {
  // FNV-1a of "a" from the reference constants
  EXPECT_EQ(compete::hash_name("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(compete::hash_name(""), 0xcbf29ce484222325ULL);
}

TEST(Rng, UniformMoments) {
  RngStream r(3, 0);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 0.002);
}

TEST(Rng, IndexIsUniform) {
  RngStream r(4, 0);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.index(7)];
  // chi-square with 6 dof; 99.9% quantile is 22.46
  double chi = 0.0;
  for (int c : counts) chi += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi, 22.46);
}

TEST(Rng, NormalMoments) {
  RngStream r(5, 0);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

class GammaMoments : public ::testing::TestWithParam<double> {};

TEST_P(GammaMoments, MeanAndVarianceEqualShape) {
  const double k = GetParam();
  RngStream r(6, static_cast<std::uint64_t>(k * 100));
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.gamma(k);
    ASSERT_GT(x, 0.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, k, 0.02 * std::max(1.0, k));
  EXPECT_NEAR(s2 / n - mean * mean, k, 0.05 * std::max(1.0, k));
}

INSTANTIATE_TEST_SUITE_P(Shapes, GammaMoments, ::testing::Values(0.6, 1.0, 2.5, 9.0));

TEST(Rng, BetaMoments) {
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{0.6, 0.6}, {2.0, 1.0}, {1.0, 1.0}, {8.0, 4.0}}) {
    RngStream r(7, static_cast<std::uint64_t>(a * 10 + b));
    const int n = 200000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = r.beta(a, b);
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 1.0);
      s += x;
      s2 += x * x;
    }
    const double m = a / (a + b);
    const double v = a * b / ((a + b) * (a + b) * (a + b + 1.0));
    EXPECT_NEAR(s / n, m, 0.004) << a << "," << b;
    EXPECT_NEAR(s2 / n - (s / n) * (s / n), v, 0.002) << a << "," << b;
  }
}

TEST(Rng, WorksWithStdAlgorithms) {
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  RngStream r(8, 0);
  std::shuffle(v.begin(), v.end(), r);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}
