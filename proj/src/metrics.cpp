#include "compete/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

namespace compete {

namespace {

constexpr double kZ95 = 1.96;

}  // namespace

AggregateStat aggregate(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("aggregate needs at least two samples");
  AggregateStat s;
  s.n = values.size();
  const auto n = static_cast<double>(s.n);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / (n - 1.0);
  s.ci95_halfwidth = kZ95 * std::sqrt(s.variance / n);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.n / 2;
  s.median = s.n % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

Trajectory trajectory_from_samples(const Eigen::MatrixXd& samples) {
  Trajectory t;
  const Index n = samples.cols();
  if (n == 0) throw std::invalid_argument("trajectory needs at least one sample");
  t.value = samples.rowwise().mean();
  if (n < 2) {
    t.ci95 = Eigen::VectorXd::Zero(samples.rows());
    return t;
  }
  const Eigen::MatrixXd centered = samples.colwise() - t.value;
  const Eigen::VectorXd var = centered.array().square().rowwise().sum() / static_cast<double>(n - 1);
  t.ci95 = kZ95 * (var.array() / static_cast<double>(n)).sqrt();
  return t;
}

Trajectory moving_average(const Trajectory& t, Index width) {
  if (width < 1) throw std::invalid_argument("moving average width must be positive");
  Trajectory out;
  out.value.resize(t.size());
  out.ci95.resize(t.size());
  double sum = 0.0;
  double ci_sum = 0.0;
  for (Index i = 0; i < t.size(); ++i) {
    sum += t.value(i);
    ci_sum += t.ci95(i);
    if (i >= width) {
      sum -= t.value(i - width);
      ci_sum -= t.ci95(i - width);
    }
    const auto k = static_cast<double>(std::min(i + 1, width));
    out.value(i) = sum / k;
    out.ci95(i) = ci_sum / k;
  }
  return out;
}

double market_share(const GameTrace& trace, std::size_t firm) {
  if (firm >= trace.firms()) throw std::out_of_range(fmt::format("firm {} not in game", firm));
  if (trace.rounds() == 0) return 0.0;
  const auto chosen = std::count(trace.chooser.begin(), trace.chooser.end(), firm);
  return static_cast<double>(chosen) / static_cast<double>(trace.rounds());
}

std::size_t eeog(const GameTrace& trace) {
  for (std::size_t t = trace.rounds(); t >= 2; --t) {
    if (trace.chooser[t - 1] != trace.chooser[t - 2]) return t;
  }
  return 0;
}

double pregame_regret(const GameTrace& trace, const MeanRewardVector& mrv) {
  const double best = mrv.best();
  double regret = 0.0;
  for (const WarmLog& log : trace.warm) {
    for (std::uint32_t a : log.arms) regret += best - mrv[a];
  }
  return regret;
}

Trajectory market_regret(const GameTrace& trace, const MeanRewardVector& mrv, bool include_pregame) {
  const double best = mrv.best();
  Trajectory out;
  out.value.resize(static_cast<Index>(trace.rounds()));
  out.ci95 = Eigen::VectorXd::Zero(static_cast<Index>(trace.rounds()));
  double cumulative = include_pregame ? pregame_regret(trace, mrv) : 0.0;
  for (std::size_t t = 0; t < trace.rounds(); ++t) {
    cumulative += best - mrv[trace.arm[t]];
    out.value(static_cast<Index>(t)) = cumulative;
  }
  return out;
}

namespace {

Index common_rounds(std::span<const GameTrace> traces) {
  if (traces.empty()) throw std::invalid_argument("no traces");
  const std::size_t rounds = traces.front().rounds();
  for (const auto& tr : traces) {
    if (tr.rounds() != rounds) throw std::invalid_argument("traces differ in length");
  }
  return static_cast<Index>(rounds);
}

}  // namespace

Trajectory mean_reputation_trajectory(std::span<const GameTrace> traces, std::size_t firm) {
  const Index rounds = common_rounds(traces);
  Eigen::MatrixXd samples(rounds, static_cast<Index>(traces.size()));
  for (std::size_t j = 0; j < traces.size(); ++j) {
    if (firm >= traces[j].firms()) throw std::out_of_range("firm not in trace");
    samples.col(static_cast<Index>(j)) = traces[j].reputation.col(static_cast<Index>(firm));
  }
  return trajectory_from_samples(samples);
}

Trajectory instantaneous_reward_trajectory(std::span<const GameTrace> traces, std::span<const MeanRewardVector> mrvs,
                                           std::size_t firm) {
  const Index rounds = common_rounds(traces);
  if (mrvs.size() != traces.size()) throw std::invalid_argument("one MRV per trace required");
  Trajectory out;
  out.value.resize(rounds);
  out.ci95.resize(rounds);
  for (Index t = 0; t < rounds; ++t) {
    double sum = 0.0;
    double sq = 0.0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < traces.size(); ++j) {
      if (traces[j].chooser[static_cast<std::size_t>(t)] != firm) continue;
      const double mu = mrvs[j][traces[j].arm[static_cast<std::size_t>(t)]];
      sum += mu;
      sq += mu * mu;
      ++k;
    }
    if (k == 0) {
      out.value(t) = std::numeric_limits<double>::quiet_NaN();
      out.ci95(t) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const auto kk = static_cast<double>(k);
    out.value(t) = sum / kk;
    const double var = k > 1 ? std::max(0.0, (sq - kk * out.value(t) * out.value(t)) / (kk - 1.0)) : 0.0;
    out.ci95(t) = kZ95 * std::sqrt(var / kk);
  }
  return out;
}

Trajectory relative_reputation(const Eigen::MatrixXd& scores_a, const Eigen::MatrixXd& scores_b) {
  if (scores_a.rows() != scores_b.rows() || scores_a.cols() != scores_b.cols()) {
    throw std::invalid_argument("relative reputation needs paired samples");
  }
  const Eigen::MatrixXd credit =
      (scores_a.array() > scores_b.array()).cast<double>() + 0.5 * (scores_a.array() == scores_b.array()).cast<double>();
  return trajectory_from_samples(credit);
}

Trajectory relative_reputation_trajectory(std::span<const GameTrace> a, std::span<const GameTrace> b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative reputation needs paired runs");
  const Index rounds = common_rounds(a);
  if (common_rounds(b) != rounds) throw std::invalid_argument("paired traces differ in length");
  Eigen::MatrixXd sa(rounds, static_cast<Index>(a.size()));
  Eigen::MatrixXd sb(rounds, static_cast<Index>(b.size()));
  for (std::size_t j = 0; j < a.size(); ++j) {
    sa.col(static_cast<Index>(j)) = a[j].reputation.col(0);
    sb.col(static_cast<Index>(j)) = b[j].reputation.col(0);
  }
  return relative_reputation(sa, sb);
}

}  // namespace compete
