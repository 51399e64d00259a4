#include <array>

#include <gtest/gtest.h>

#include "compete/instances.hpp"

using namespace compete;

TEST(Instances, NeedleHasOneNeedle) {
  RngStream r(1, 0);
  InstanceKind k;
  k.tag = InstanceTag::NeedleInHaystack;
  for (int i = 0; i < 50; ++i) {
    const auto m = sample_instance(k, 10, r);
    int needles = 0;
    int hay = 0;
    for (Index a = 0; a < 10; ++a) {
      needles += m[a] == 0.7 ? 1 : 0;
      hay += m[a] == 0.5 ? 1 : 0;
    }
    EXPECT_EQ(needles, 1);
    EXPECT_EQ(hay, 9);
  }
}

TEST(Instances, SingleArmIsTheNeedle) {
  RngStream r(2, 0);
  InstanceKind k;
  k.tag = InstanceTag::NeedleInHaystack;
  const auto m = sample_instance(k, 1, r);
  ASSERT_EQ(m.arms(), 1);
  EXPECT_EQ(m[0], 0.7);
}

TEST(Instances, NeedlePositionUniform) {
  RngStream r(3, 0);
  InstanceKind k;
  k.tag = InstanceTag::NeedleInHaystack;
  std::array<int, 10> hits{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++hits[static_cast<std::size_t>(sample_instance(k, 10, r).best_arm())];
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / n, 0.1, 0.02);
}

TEST(Instances, UniformWithinBounds) {
  RngStream r(4, 0);
  InstanceKind k;
  k.tag = InstanceTag::Uniform;
  for (int i = 0; i < 200; ++i) {
    const auto m = sample_instance(k, 10, r);
    EXPECT_GE(m.means().minCoeff(), 0.25);
    EXPECT_LE(m.means().maxCoeff(), 0.75);
  }
}

TEST(Instances, HeavyTailMeanIsHalf) {
  RngStream r(5, 0);
  InstanceKind k;
  k.tag = InstanceTag::HeavyTail;
  double s = 0.0;
  int tails = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto m = sample_instance(k, 10, r);
    s += m.means().sum();
    for (Index a = 0; a < 10; ++a) tails += m[a] < 0.1 || m[a] > 0.9 ? 1 : 0;
  }
  EXPECT_NEAR(s / (10.0 * draws), 0.5, 0.01);
  // Beta(0.6,0.6) puts 0.352 of its mass outside [0.1, 0.9]; Uniform(0,1) only 0.2
  EXPECT_NEAR(tails / (10.0 * draws), 0.352, 0.01);
}

TEST(Instances, ValidatesParameters) {
  RngStream r(6, 0);
  InstanceKind k;
  k.needle_mean = 1.2;
  EXPECT_THROW(sample_instance(k, 10, r), ConfigError);
  InstanceKind u;
  u.tag = InstanceTag::Uniform;
  u.uniform_lo = 0.8;
  u.uniform_hi = 0.2;
  EXPECT_THROW(sample_instance(u, 10, r), ConfigError);
  InstanceKind h;
  h.tag = InstanceTag::HeavyTail;
  h.beta_a = 0.0;
  EXPECT_THROW(sample_instance(h, 10, r), ConfigError);
  EXPECT_THROW(sample_instance(InstanceKind{}, 0, r), ConfigError);
}

TEST(Instances, NamesAndDescriptors) {
  EXPECT_EQ(parse_instance_tag("needle"), InstanceTag::NeedleInHaystack);
  EXPECT_EQ(parse_instance_tag("heavy_tail"), InstanceTag::HeavyTail);
  EXPECT_THROW(parse_instance_tag("gaussian"), ConfigError);
  InstanceKind k;
  k.tag = InstanceTag::HeavyTail;
  EXPECT_EQ(k.name(), "heavy_tail");
  EXPECT_EQ(k.descriptor(), "heavy_tail(0.6,0.6)");
}
