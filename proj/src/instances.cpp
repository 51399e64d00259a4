#include "compete/instances.hpp"

#include <fmt/format.h>

namespace compete {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void InstanceKind::validate() const {
  if (!in_unit(needle_mean) || !in_unit(haystack_mean)) throw ConfigError("needle/haystack means must lie in [0,1]");
  if (!in_unit(uniform_lo) || !in_unit(uniform_hi) || !(uniform_lo < uniform_hi)) {
    throw ConfigError("uniform bounds must satisfy 0 <= lo < hi <= 1");
  }
  if (!(beta_a > 0.0) || !(beta_b > 0.0)) throw ConfigError("heavy-tail Beta shapes must be positive");
}

std::string InstanceKind::name() const {
  switch (tag) {
    case InstanceTag::NeedleInHaystack:
      return "needle";
    case InstanceTag::Uniform:
      return "uniform";
    case InstanceTag::HeavyTail:
      return "heavy_tail";
  }
  return "unknown";
}

std::string InstanceKind::descriptor() const {
  switch (tag) {
    case InstanceTag::NeedleInHaystack:
      return fmt::format("needle({},{})", needle_mean, haystack_mean);
    case InstanceTag::Uniform:
      return fmt::format("uniform({},{})", uniform_lo, uniform_hi);
    case InstanceTag::HeavyTail:
      return fmt::format("heavy_tail({},{})", beta_a, beta_b);
  }
  return "unknown";
}

InstanceTag parse_instance_tag(std::string_view name) {
  if (name == "needle" || name == "needle_in_haystack") return InstanceTag::NeedleInHaystack;
  if (name == "uniform") return InstanceTag::Uniform;
  if (name == "heavy_tail" || name == "heavytail") return InstanceTag::HeavyTail;
  throw ConfigError(fmt::format("unknown instance kind '{}'", name));
}

MeanRewardVector sample_instance(const InstanceKind& kind, Index arms, RngStream& rng) {
  if (arms < 1) throw ConfigError("an instance needs K >= 1 arms");
  kind.validate();
  Eigen::VectorXd means(arms);
  switch (kind.tag) {
    case InstanceTag::NeedleInHaystack: {
      means.setConstant(kind.haystack_mean);
      means(static_cast<Index>(rng.index(static_cast<std::size_t>(arms)))) = kind.needle_mean;
      break;
    }
    case InstanceTag::Uniform:
      for (Index a = 0; a < arms; ++a) means(a) = rng.uniform(kind.uniform_lo, kind.uniform_hi);
      break;
    case InstanceTag::HeavyTail:
      for (Index a = 0; a < arms; ++a) means(a) = rng.beta(kind.beta_a, kind.beta_b);
      break;
  }
  return MeanRewardVector(std::move(means));
}

}  // namespace compete
