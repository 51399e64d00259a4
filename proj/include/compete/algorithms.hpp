#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "compete/core.hpp"

namespace compete {

enum class AlgorithmTag {
  BayesGreedy,          // "dg"
  BayesEpsilonGreedy,   // "deg"
  ThompsonSampling,     // "ts"
  StaticGreedy,         // "sg": argmax prior mean, forever
  GreedyModification,   // "greedy_mod"
};

enum class TieBreak { LowestIndex, Uniform };

/// Which algorithm a firm runs, with its parameters.
///
/// For GreedyModification, `inner` names the wrapped algorithm (epsilon-greedy
/// or Thompson sampling; `epsilon` applies when the inner is epsilon-greedy),
/// `mix_p` is the greedy-choice probability and `switch_step` is n0.
struct AlgorithmKind {
  AlgorithmTag tag = AlgorithmTag::BayesGreedy;
  double epsilon = 0.05;
  AlgorithmTag inner = AlgorithmTag::ThompsonSampling;
  double mix_p = 0.1;
  int switch_step = 1;
  TieBreak tie_break = TieBreak::LowestIndex;

  static AlgorithmKind bayes_greedy() { return {}; }
  static AlgorithmKind epsilon_greedy(double epsilon = 0.05);
  static AlgorithmKind thompson();
  static AlgorithmKind static_greedy();
  static AlgorithmKind greedy_modification(AlgorithmTag inner, double mix_p, int switch_step, double epsilon = 0.05);

  /// The wrapped algorithm of a greedy modification, as a kind of its own.
  AlgorithmKind inner_kind() const;
  void validate() const;
  std::string name() const;

  friend bool operator==(const AlgorithmKind&, const AlgorithmKind&) = default;
};

/// "dg", "deg", "ts", "sg" or "greedy_mod".
AlgorithmTag parse_algorithm_tag(std::string_view name);
std::string_view algorithm_tag_name(AlgorithmTag tag);

enum class Recording { Recorded, Unrecorded };

struct ArmChoice {
  std::size_t arm = 0;
  Recording recording = Recording::Recorded;
};

/// Separate sub-streams per random mechanism, so that switching one mechanism
/// on or off never shifts the draws of another.
struct AlgorithmStreams {
  explicit AlgorithmStreams(const RngStream& parent);

  RngStream explore_coin;
  RngStream explore_arm;
  RngStream samples;
  RngStream mix_coin;
  RngStream ties;
};

/// Beta(1,1)-prior posteriors plus step counter for one firm's algorithm.
///
/// `step()` is the number of recorded observations plus one. Unrecorded
/// observations (greedy-modification exploit steps) leave the state untouched.
class AlgorithmState {
 public:
  AlgorithmState(AlgorithmKind kind, std::size_t arms);

  const AlgorithmKind& kind() const noexcept { return kind_; }
  std::size_t arms() const noexcept { return posteriors_.size(); }
  std::size_t step() const noexcept { return recorded_ + 1; }
  std::size_t recorded() const noexcept { return recorded_; }
  const BetaPosterior& posterior(std::size_t arm) const { return posteriors_.at(arm); }
  const std::vector<BetaPosterior>& posteriors() const noexcept { return posteriors_; }

  /// In-place form of observe(); throws std::out_of_range for a bad arm.
  void record(std::size_t arm, int reward, Recording recording);

  friend bool operator==(const AlgorithmState&, const AlgorithmState&) = default;

 private:
  AlgorithmKind kind_;
  std::vector<BetaPosterior> posteriors_;
  std::size_t recorded_ = 0;
};

/// Greedy choice on the current posteriors (argmax posterior mean).
std::size_t greedy_arm(const AlgorithmState& state, TieBreak tie_break, RngStream& ties);

ArmChoice next_arm(const AlgorithmState& state, AlgorithmStreams& streams);

[[nodiscard]] AlgorithmState observe(AlgorithmState state, std::size_t arm, int reward, Recording recording);

}  // namespace compete
