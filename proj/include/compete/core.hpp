#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "compete/rng.hpp"

namespace compete {

using Index = Eigen::Index;

/// Invalid configuration or plan (CLI exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A resource or state-space guard refused the request (CLI exit code 2).
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The hidden per-arm Bernoulli means of one problem draw.
class MeanRewardVector {
 public:
  explicit MeanRewardVector(Eigen::VectorXd means);

  Index arms() const noexcept { return means_.size(); }
  double operator[](Index arm) const { return means_(arm); }
  const Eigen::VectorXd& means() const noexcept { return means_; }
  double best() const { return means_.maxCoeff(); }
  /// Lowest index among the best arms.
  Index best_arm() const;

 private:
  Eigen::VectorXd means_;
};

/// Pre-drawn 0/1 reward matrix: rows are rounds, columns are arms.
///
/// Warm-start round t (1-based) reads row t-1; game round t of an experiment
/// whose longest warm start is T_max reads row T_max + t - 1.
class RealizationTable {
 public:
  using Matrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

  explicit RealizationTable(Matrix rewards);

  Index rows() const noexcept { return rewards_.rows(); }
  Index arms() const noexcept { return rewards_.cols(); }
  int operator()(Index row, Index arm) const { return rewards_(row, arm); }
  const Matrix& matrix() const noexcept { return rewards_; }
  double column_mean(Index arm) const;

  friend bool operator==(const RealizationTable& a, const RealizationTable& b) {
    return a.rewards_.rows() == b.rewards_.rows() && a.rewards_.cols() == b.rewards_.cols() &&
           a.rewards_ == b.rewards_;
  }

 private:
  Matrix rewards_;
};

/// Draws every entry (t, a) as an independent Bernoulli(mu(a)).
///
/// Column a comes from its own child stream, so a longer table extends a
/// shorter one drawn from the same stream.
RealizationTable generate_realization_table(const MeanRewardVector& mrv, Index rows, const RngStream& rng);

/// Beta(alpha, beta) posterior over one arm's mean.
struct BetaPosterior {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const noexcept { return alpha / (alpha + beta); }
  double observations() const noexcept { return alpha + beta - 2.0; }

  friend bool operator==(const BetaPosterior&, const BetaPosterior&) = default;
};

/// Conjugate update: a 1 adds to alpha, a 0 adds to beta.
[[nodiscard]] constexpr BetaPosterior posterior_update(BetaPosterior p, int reward) noexcept {
  if (reward != 0) {
    p.alpha += 1.0;
  } else {
    p.beta += 1.0;
  }
  return p;
}

/// CSV cache of realization tables, header "mrv_index,row,arm,reward".
void write_tables_csv(std::ostream& out, const std::map<std::size_t, RealizationTable>& tables);
std::map<std::size_t, RealizationTable> read_tables_csv(std::istream& in);

}  // namespace compete
