#include <array>
#include <cmath>

#include <gtest/gtest.h>

#include "compete/choice.hpp"

using namespace compete;

namespace {

double share_first(const ResponseFunction& f, std::array<double, 2> scores, int n, std::uint64_t seed) {
  RngStream r(seed, 0);
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += choose_firm(f, scores, r) == 0 ? 1 : 0;
  return static_cast<double>(hits) / n;
}

}  // namespace

TEST(ReputationWindow, Examples) {
  ReputationWindow w(100);
  EXPECT_EQ(w.score(), 0.5);
  for (int i = 0; i < 3; ++i) w.push(1);
  EXPECT_EQ(w.score(), 1.0);
  ReputationWindow evict(100);
  for (int i = 0; i < 50; ++i) evict.push(1);
  for (int i = 0; i < 100; ++i) evict.push(0);
  EXPECT_EQ(evict.size(), 100u);
  EXPECT_EQ(evict.score(), 0.0);
  EXPECT_THROW(ReputationWindow(0), ConfigError);
}

TEST(ReputationWindow, MatchesDirectMean) {
  ReputationWindow w(7);
  std::vector<int> all;
  RngStream r(1, 0);
  for (int i = 0; i < 60; ++i) {
    const int x = r.bernoulli(0.4) ? 1 : 0;
    w.push(x);
    all.push_back(x);
    const std::size_t from = all.size() > 7 ? all.size() - 7 : 0;
    double s = 0.0;
    for (std::size_t j = from; j < all.size(); ++j) s += all[j];
    ASSERT_DOUBLE_EQ(w.score(), s / static_cast<double>(all.size() - from));
  }
}

TEST(Choice, HardMaxPicksHigher) {
  EXPECT_EQ(share_first(ResponseFunction::hard_max(), {0.8, 0.3}, 1000, 2), 1.0);
  EXPECT_EQ(share_first(ResponseFunction::hard_max(), {0.3, 0.8}, 1000, 2), 0.0);
}

TEST(Choice, HardMaxFairAndBiasedTies) {
  EXPECT_NEAR(share_first(ResponseFunction::hard_max(), {0.5, 0.5}, 100000, 3), 0.5, 0.005);
  EXPECT_EQ(share_first(ResponseFunction::hard_max(1.0), {0.5, 0.5}, 1000, 3), 1.0);
}

TEST(Choice, HardMaxRandomMixture) {
  EXPECT_NEAR(share_first(ResponseFunction::hard_max_random(0.1), {0.8, 0.3}, 100000, 4), 0.95, 0.005);
}

TEST(Choice, SoftMaxExamples) {
  const auto f = ResponseFunction::soft_max(9.0);
  EXPECT_NEAR(f.prob_first(-1.0), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(f.prob_first(0.0), 0.5);
  for (double d = -1.0; d <= 1.0; d += 0.05) {
    EXPECT_NEAR(f.prob_first(d) + f.prob_first(-d), 1.0, 1e-15);
    EXPECT_GE(f.prob_first(d), 0.1 - 1e-15);
    EXPECT_LE(f.prob_first(d), 0.9 + 1e-15);
  }
  EXPECT_NEAR(share_first(f, {0.0, 1.0}, 100000, 5), 0.1, 0.005);
}

TEST(Choice, HardMaxIgnoresMonotoneTransforms) {
  RngStream a(6, 0);
  RngStream b(6, 0);
  RngStream scores(6, 1);
  const ResponseFunction f = ResponseFunction::hard_max();
  for (int i = 0; i < 2000; ++i) {
    std::array<double, 3> s{};
    for (double& x : s) x = std::round(scores.uniform() * 4.0) / 4.0;  // ties happen
    std::array<double, 3> t{};
    for (std::size_t j = 0; j < 3; ++j) t[j] = std::exp(3.0 * s[j]) - 7.0;
    ASSERT_EQ(choose_firm(f, s, a), choose_firm(f, t, b));
  }
}

TEST(Choice, NFirmTiesAreUniform) {
  RngStream r(7, 0);
  std::array<int, 4> hits{};
  const std::array<double, 4> s{0.6, 0.2, 0.6, 0.6};
  for (int i = 0; i < 60000; ++i) ++hits[choose_firm(ResponseFunction::hard_max(), s, r)];
  EXPECT_EQ(hits[1], 0);
  for (std::size_t i : {0u, 2u, 3u}) EXPECT_NEAR(hits[i] / 60000.0, 1.0 / 3.0, 0.01);
}

TEST(Choice, Validation) {
  RngStream r(8, 0);
  EXPECT_THROW(choose_firm(ResponseFunction::hard_max(), std::span<const double>{}, r), ConfigError);
  const std::array<double, 3> three{0.1, 0.2, 0.3};
  EXPECT_THROW(choose_firm(ResponseFunction::soft_max(), three, r), ConfigError);
  EXPECT_THROW(ResponseFunction::hard_max_random(0.0).validate(), ConfigError);
  EXPECT_THROW(ResponseFunction::soft_max(1.0).validate(), ConfigError);
  EXPECT_THROW(ResponseFunction::hard_max(1.5).validate(), ConfigError);
  EXPECT_THROW(parse_response_tag("probit"), ConfigError);
}

TEST(Choice, SoftMaxConstants) {
  // f'(x) = ln(b) f (1 - f); on [-1, 1] the slope is smallest at the ends
  const auto k = softmax_constants(ResponseFunction::soft_max(9.0), 1.0);
  EXPECT_NEAR(k.eps0, 0.1, 1e-15);
  EXPECT_NEAR(k.c0, std::log(9.0) * 0.9 * 0.1, 1e-12);
  EXPECT_NEAR(k.c0_prime, std::log(9.0) * 0.25, 1e-12);
  EXPECT_THROW(softmax_constants(ResponseFunction::hard_max(), 1.0), ConfigError);
}

TEST(Choice, HmrBaselineIsHalfEpsilon) {
  EXPECT_DOUBLE_EQ(ResponseFunction::hard_max_random(0.1).baseline(), 0.05);
}
