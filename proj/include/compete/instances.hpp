#pragma once

#include <string>
#include <string_view>

#include "compete/core.hpp"

namespace compete {

enum class InstanceTag { NeedleInHaystack, Uniform, HeavyTail };

/// A distribution over mean reward vectors. Defaults are the standard
/// parameterisation of each family.
struct InstanceKind {
  InstanceTag tag = InstanceTag::HeavyTail;
  double needle_mean = 0.7;
  double haystack_mean = 0.5;
  double uniform_lo = 0.25;
  double uniform_hi = 0.75;
  double beta_a = 0.6;
  double beta_b = 0.6;

  void validate() const;
  /// Short config name: "needle", "uniform" or "heavy_tail".
  std::string name() const;
  /// Name plus every parameter, used to key MRV streams.
  std::string descriptor() const;
};

InstanceTag parse_instance_tag(std::string_view name);

/// One MRV draw. Needle: one uniformly chosen arm gets the needle mean.
/// Uniform: i.i.d. uniform on the bounds. HeavyTail: i.i.d. Beta(a, b).
MeanRewardVector sample_instance(const InstanceKind& kind, Index arms, RngStream& rng);

}  // namespace compete
