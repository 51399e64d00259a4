#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "compete/core.hpp"
#include "compete/engine.hpp"

namespace compete {

/// Mean, unbiased variance, median and a normal-approximation 95% CI.
struct AggregateStat {
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  double variance = 0.0;
  double median = 0.0;
  std::size_t n = 0;
};

/// Needs at least two samples.
AggregateStat aggregate(std::span<const double> values);

/// Per-round values (round 1 at index 0) with a 95% half-width per round.
struct Trajectory {
  Eigen::VectorXd value;
  Eigen::VectorXd ci95;

  Index size() const noexcept { return value.size(); }
};

/// Per-round mean and CI over columns of a rounds x samples matrix.
Trajectory trajectory_from_samples(const Eigen::MatrixXd& samples);

/// Trailing moving average of width w (w = 1 is the identity).
Trajectory moving_average(const Trajectory& t, Index width);

/// Fraction of game rounds in which `firm` was chosen.
double market_share(const GameTrace& trace, std::size_t firm);

/// Last round t >= 2 (1-based) whose chooser differs from round t-1's; 0 if
/// the same firm served every round.
std::size_t eeog(const GameTrace& trace);

/// Total regret over warm-start and monopoly rounds of every firm.
double pregame_regret(const GameTrace& trace, const MeanRewardVector& mrv);

/// Cumulative t * max mu - sum_{s<=t} mu(a_s); optionally offset by the
/// pre-game regret.
Trajectory market_regret(const GameTrace& trace, const MeanRewardVector& mrv, bool include_pregame);

/// Per-round mean over traces of `firm`'s pre-choice reputation score.
Trajectory mean_reputation_trajectory(std::span<const GameTrace> traces, std::size_t firm);

/// Per-round mean of mu(a_t) over the traces in which `firm` served round t;
/// NaN at rounds it served in none.
Trajectory instantaneous_reward_trajectory(std::span<const GameTrace> traces, std::span<const MeanRewardVector> mrvs,
                                           std::size_t firm);

/// Per round: fraction of paired samples where A's score beats B's, with
/// half credit for ties. Both matrices are rounds x samples.
Trajectory relative_reputation(const Eigen::MatrixXd& scores_a, const Eigen::MatrixXd& scores_b);

/// Trace form: firm 0 of each trace in `a` against firm 0 of its pair in `b`.
Trajectory relative_reputation_trajectory(std::span<const GameTrace> a, std::span<const GameTrace> b);

}  // namespace compete
