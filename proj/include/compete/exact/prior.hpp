#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <fmt/format.h>

#include "compete/core.hpp"

namespace compete::exact {

inline constexpr std::size_t kMaxArms = 4;
inline constexpr double kTieTolerance = 1e-12;

/// Per-arm (heads, tails) counts packed 8 bits each into one word.
class CountState {
 public:
  CountState() = default;

  int heads(std::size_t arm) const noexcept { return field(2 * arm); }
  int tails(std::size_t arm) const noexcept { return field(2 * arm + 1); }
  int pulls(std::size_t arm) const noexcept { return heads(arm) + tails(arm); }

  int total(std::size_t arms) const noexcept {
    int n = 0;
    for (std::size_t a = 0; a < arms; ++a) n += pulls(a);
    return n;
  }

  [[nodiscard]] CountState with(std::size_t arm, int reward) const {
    const std::size_t slot = 2 * arm + (reward != 0 ? 0 : 1);
    if (field(slot) == 0xff) throw GuardError("count overflow in exact state");
    CountState s = *this;
    s.bits_ += std::uint64_t{1} << (8 * slot);
    return s;
  }

  std::uint64_t bits() const noexcept { return bits_; }

  friend auto operator<=>(const CountState&, const CountState&) = default;

 private:
  int field(std::size_t slot) const noexcept { return static_cast<int>((bits_ >> (8 * slot)) & 0xff); }

  std::uint64_t bits_ = 0;
};

/// Independent finite-support prior over each arm's mean reward.
template <typename Scalar>
class FiniteSupportPrior {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Arm {
    Vector support;
    Vector weights;
  };

  explicit FiniteSupportPrior(std::vector<Arm> arms) : arms_(std::move(arms)) { validate(); }

  std::size_t arms() const noexcept { return arms_.size(); }
  const Arm& arm(std::size_t a) const { return arms_.at(a); }

  Scalar prior_mean(std::size_t a) const { return arm(a).weights.dot(arm(a).support); }

  /// Weights after h ones and t zeros on arm a.
  Vector posterior_weights(std::size_t a, int h, int t) const {
    const Arm& x = arm(a);
    Vector w(x.support.size());
    for (Index j = 0; j < x.support.size(); ++j) {
      using std::pow;
      w(j) = x.weights(j) * pow(x.support(j), h) * pow(Scalar(1) - x.support(j), t);
    }
    return w / w.sum();
  }

  Scalar posterior_mean(std::size_t a, int h, int t) const { return posterior_weights(a, h, t).dot(arm(a).support); }

  Scalar posterior_mean(std::size_t a, const CountState& s) const { return posterior_mean(a, s.heads(a), s.tails(a)); }

  /// E[max_a mu_a] by enumerating the product of supports.
  Scalar expected_max() const {
    Scalar total(0);
    std::vector<Index> idx(arms_.size(), 0);
    while (true) {
      Scalar w(1);
      Scalar best(0);
      for (std::size_t a = 0; a < arms_.size(); ++a) {
        w *= arms_[a].weights(idx[a]);
        best = a == 0 ? arms_[a].support(idx[a]) : std::max(best, arms_[a].support(idx[a]));
      }
      total += w * best;
      std::size_t a = 0;
      while (a < arms_.size() && ++idx[a] == arms_[a].support.size()) idx[a++] = 0;
      if (a == arms_.size()) break;
    }
    return total;
  }

  template <typename Other>
  FiniteSupportPrior<Other> cast() const {
    std::vector<typename FiniteSupportPrior<Other>::Arm> out;
    for (const Arm& x : arms_) out.push_back({x.support.template cast<Other>(), x.weights.template cast<Other>()});
    return FiniteSupportPrior<Other>(std::move(out));
  }

 private:
  void validate() const {
    if (arms_.empty() || arms_.size() > kMaxArms) {
      throw ConfigError(fmt::format("exact prior supports 1..{} arms, got {}", kMaxArms, arms_.size()));
    }
    for (std::size_t a = 0; a < arms_.size(); ++a) {
      const Arm& x = arms_[a];
      if (x.support.size() == 0 || x.support.size() != x.weights.size()) {
        throw ConfigError(fmt::format("arm {}: support and weights must be non-empty and the same length", a));
      }
      for (Index j = 0; j < x.support.size(); ++j) {
        if (!(x.support(j) > Scalar(0) && x.support(j) < Scalar(1))) {
          throw ConfigError(fmt::format("arm {}: support point outside (0,1)", a));
        }
        if (!(x.weights(j) >= Scalar(0))) throw ConfigError(fmt::format("arm {}: negative weight", a));
      }
      using std::abs;
      if (abs(x.weights.sum() - Scalar(1)) > Scalar(1e-12)) {
        throw ConfigError(fmt::format("arm {}: weights do not sum to 1", a));
      }
    }
  }

  std::vector<Arm> arms_;
};

/// Same support and weights on every arm.
template <typename Scalar>
FiniteSupportPrior<Scalar> symmetric_prior(std::size_t arms, const std::vector<double>& support,
                                           const std::vector<double>& weights) {
  using Vector = typename FiniteSupportPrior<Scalar>::Vector;
  Vector s(static_cast<Index>(support.size()));
  Vector w(static_cast<Index>(weights.size()));
  for (std::size_t j = 0; j < support.size(); ++j) s(static_cast<Index>(j)) = Scalar(support[j]);
  for (std::size_t j = 0; j < weights.size(); ++j) w(static_cast<Index>(j)) = Scalar(weights[j]);
  return FiniteSupportPrior<Scalar>(std::vector<typename FiniteSupportPrior<Scalar>::Arm>(arms, {s, w}));
}

}  // namespace compete::exact
