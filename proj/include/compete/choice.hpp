#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compete/core.hpp"

namespace compete {

/// Sliding window over a firm's most recent rewards.
class ReputationWindow {
 public:
  explicit ReputationWindow(std::size_t capacity = 100);

  void push(int reward);
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return buffer_.size(); }
  bool empty() const noexcept { return size_ == 0; }
  /// Mean of the held rewards; 0.5 (the Beta(1,1) prior mean) when empty.
  double score() const noexcept;

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  std::size_t ones_ = 0;
};

inline double reputation_score(const ReputationWindow& w) noexcept { return w.score(); }

enum class ResponseTag { HardMax, HardMaxRandom, SoftMax };

/// How an agent turns firms' reward estimates into a choice.
///
/// HardMaxRandom: with probability `epsilon` the agent picks uniformly, else
/// it behaves as HardMax; so the lower-scored of two firms gets epsilon/2.
/// SoftMax: firm 0 with probability 1 / (1 + base^-(s0 - s1)).
/// `tie_prob` is the probability that a HardMax agent picks firm 0 on a tie.
struct ResponseFunction {
  ResponseTag tag = ResponseTag::HardMax;
  double epsilon = 0.1;
  double base = 9.0;
  double tie_prob = 0.5;

  static ResponseFunction hard_max(double tie_prob = 0.5);
  static ResponseFunction hard_max_random(double epsilon, double tie_prob = 0.5);
  static ResponseFunction soft_max(double base = 9.0);

  void validate() const;
  std::string name() const;

  /// Probability of choosing firm 0 given delta = est_0 - est_1, for two
  /// firms. |delta| <= tie_tolerance counts as a tie.
  double prob_first(double delta, double tie_tolerance = 0.0) const;
  /// f(-1): the smallest probability a firm can get.
  double baseline() const { return prob_first(-1.0); }
};

ResponseTag parse_response_tag(std::string_view name);

/// Chosen firm index. HardMax generalises to n firms with uniform
/// tie-breaking among the top set (tie_prob applies to duopolies only).
std::size_t choose_firm(const ResponseFunction& f, std::span<const double> scores, RngStream& rng);

/// Smoothness constants of a SoftMax response on [-delta0, delta0].
struct SoftMaxConstants {
  double eps0 = 0.0;     // f(-1)
  double c0 = 0.0;       // min f'
  double c0_prime = 0.0; // max f'
  double delta0 = 0.0;
};

SoftMaxConstants softmax_constants(const ResponseFunction& f, double delta0);

}  // namespace compete
