#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <fmt/format.h>

#include "compete/algorithms.hpp"
#include "compete/exact/prior.hpp"

namespace compete::exact {

inline constexpr double kStateGuard = 1e6;

/// rew(1..H) and bir(1..H), stored 0-based.
template <typename Scalar>
struct RewardCurve {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector rew;
  Vector bir;
  Scalar best = Scalar(0);  // E[max_a mu_a]

  Index horizon() const noexcept { return rew.size(); }
  Scalar rew_at(Index n) const { return rew(n - 1); }
  Scalar bir_at(Index n) const { return bir(n - 1); }

  /// Cumulative Bayesian regret BReg(n) = sum_{m<=n} bir(m).
  Vector breg() const {
    Vector out(bir.size());
    Scalar acc(0);
    for (Index i = 0; i < bir.size(); ++i) out(i) = acc += bir(i);
    return out;
  }

  static RewardCurve from_rew(Scalar best, Vector rew) {
    RewardCurve c;
    c.best = best;
    c.bir = Vector::Constant(rew.size(), best) - rew;
    c.rew = std::move(rew);
    return c;
  }

  static RewardCurve from_bir(Scalar best, Vector bir) {
    RewardCurve c;
    c.best = best;
    c.rew = Vector::Constant(bir.size(), best) - bir;
    c.bir = std::move(bir);
    return c;
  }
};

/// Upper bound on CountStates with at most H-1 observations over K arms:
/// C(H-1+2K, 2K). Throws GuardError past 10^6.
inline double count_state_bound(std::size_t arms, std::size_t horizon) {
  const double n = static_cast<double>(horizon) - 1.0 + 2.0 * static_cast<double>(arms);
  const double k = 2.0 * static_cast<double>(arms);
  double c = 1.0;
  for (double i = 1.0; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline void check_guard(std::size_t arms, std::size_t horizon) {
  if (horizon < 1) throw ConfigError("exact horizon must be at least 1");
  const double bound = count_state_bound(arms, horizon);
  if (bound > kStateGuard) {
    throw GuardError(fmt::format("{} arms at horizon {} reach up to {:.0f} count states (limit {:.0f})", arms, horizon,
                                 bound, kStateGuard));
  }
}

namespace detail {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Vec<Scalar> posterior_means(const FiniteSupportPrior<Scalar>& prior, const CountState& s) {
  Vec<Scalar> m(static_cast<Index>(prior.arms()));
  for (std::size_t a = 0; a < prior.arms(); ++a) m(static_cast<Index>(a)) = prior.posterior_mean(a, s);
  return m;
}

/// Argmax law over `values`; ties within kTieTolerance go to the lowest index
/// or are split uniformly.
template <typename Scalar>
Vec<Scalar> argmax_law(const Vec<Scalar>& values, TieBreak tie_break) {
  const Scalar top = values.maxCoeff();
  Vec<Scalar> law = Vec<Scalar>::Zero(values.size());
  const Scalar cut = top - Scalar(kTieTolerance);
  if (tie_break == TieBreak::LowestIndex) {
    for (Index a = 0; a < values.size(); ++a) {
      if (values(a) >= cut) {
        law(a) = Scalar(1);
        break;
      }
    }
    return law;
  }
  for (Index a = 0; a < values.size(); ++a) law(a) = values(a) >= cut ? Scalar(1) : Scalar(0);
  return law / law.sum();
}

/// Exact Thompson law: each arm draws a support point from its posterior,
/// the highest draw wins, ties to the lowest index.
template <typename Scalar>
Vec<Scalar> thompson_law(const FiniteSupportPrior<Scalar>& prior, const CountState& s) {
  const std::size_t k = prior.arms();
  std::vector<Vec<Scalar>> post;
  for (std::size_t a = 0; a < k; ++a) post.push_back(prior.posterior_weights(a, s.heads(a), s.tails(a)));
  Vec<Scalar> law = Vec<Scalar>::Zero(static_cast<Index>(k));
  std::vector<Index> idx(k, 0);
  Vec<Scalar> draw(static_cast<Index>(k));
  while (true) {
    Scalar w(1);
    for (std::size_t a = 0; a < k; ++a) {
      w *= post[a](idx[a]);
      draw(static_cast<Index>(a)) = prior.arm(a).support(idx[a]);
    }
    if (w > Scalar(0)) law += w * argmax_law<Scalar>(draw, TieBreak::LowestIndex);
    std::size_t a = 0;
    while (a < k && ++idx[a] == prior.arm(a).support.size()) idx[a++] = 0;
    if (a == k) break;
  }
  return law;
}

template <typename Scalar>
Vec<Scalar> static_law(const FiniteSupportPrior<Scalar>& prior, TieBreak tie_break) {
  Vec<Scalar> means(static_cast<Index>(prior.arms()));
  for (std::size_t a = 0; a < prior.arms(); ++a) means(static_cast<Index>(a)) = prior.prior_mean(a);
  return argmax_law<Scalar>(means, tie_break);
}

}  // namespace detail

/// Arm distribution of a count-determined algorithm (anything but the greedy
/// modification) at count state s.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> base_law(const AlgorithmKind& kind, const FiniteSupportPrior<Scalar>& prior,
                                                  const CountState& s) {
  using V = detail::Vec<Scalar>;
  switch (kind.tag) {
    case AlgorithmTag::BayesGreedy:
      return detail::argmax_law<Scalar>(detail::posterior_means(prior, s), kind.tie_break);
    case AlgorithmTag::BayesEpsilonGreedy: {
      const V g = detail::argmax_law<Scalar>(detail::posterior_means(prior, s), kind.tie_break);
      const Scalar eps(kind.epsilon);
      return (Scalar(1) - eps) * g + V::Constant(g.size(), eps / Scalar(static_cast<double>(prior.arms())));
    }
    case AlgorithmTag::ThompsonSampling:
      return detail::thompson_law(prior, s);
    case AlgorithmTag::StaticGreedy:
      return detail::static_law(prior, kind.tie_break);
    case AlgorithmTag::GreedyModification:
      break;
  }
  throw std::logic_error("greedy modification has no count-determined law");
}

namespace detail {

/// Expected posterior mean of the arm drawn from `law`.
template <typename Scalar>
Scalar law_reward(const Vec<Scalar>& law, const Vec<Scalar>& means) {
  return law.dot(means);
}

template <typename Scalar>
void push_transitions(std::map<CountState, Scalar>& next, const CountState& s, Scalar mass, const Vec<Scalar>& law,
                      const Vec<Scalar>& means) {
  for (Index a = 0; a < law.size(); ++a) {
    if (law(a) <= Scalar(0)) continue;
    const Scalar m = mass * law(a);
    next[s.with(static_cast<std::size_t>(a), 1)] += m * means(a);
    next[s.with(static_cast<std::size_t>(a), 0)] += m * (Scalar(1) - means(a));
  }
}

/// DP for an algorithm whose law depends on (state, step); every step is
/// recorded. Fills rew and, if asked, the greedy-step reward on the same
/// state distribution.
template <typename Scalar, typename Law>
void recorded_dp(const FiniteSupportPrior<Scalar>& prior, std::size_t horizon, Law&& law_at, Vec<Scalar>& rew,
                 Vec<Scalar>* greedy_rew) {
  std::map<CountState, Scalar> dist{{CountState{}, Scalar(1)}};
  rew.resize(static_cast<Index>(horizon));
  if (greedy_rew) greedy_rew->resize(static_cast<Index>(horizon));
  for (std::size_t n = 1; n <= horizon; ++n) {
    Scalar r(0);
    Scalar g(0);
    std::map<CountState, Scalar> next;
    for (const auto& [s, mass] : dist) {
      const Vec<Scalar> means = posterior_means(prior, s);
      const Vec<Scalar> law = law_at(s, n);
      r += mass * law_reward(law, means);
      if (greedy_rew) g += mass * means.maxCoeff();
      if (n < horizon) push_transitions(next, s, mass, law, means);
    }
    rew(static_cast<Index>(n - 1)) = r;
    if (greedy_rew) (*greedy_rew)(static_cast<Index>(n - 1)) = g;
    dist = std::move(next);
  }
}

}  // namespace detail

/// Bayesian-expected reward at each local step 1..H, by dynamic programming
/// over count states.
template <typename Scalar>
RewardCurve<Scalar> exact_reward_curve(const AlgorithmKind& kind, const FiniteSupportPrior<Scalar>& prior,
                                       std::size_t horizon) {
  kind.validate();
  check_guard(prior.arms(), horizon);
  using V = detail::Vec<Scalar>;
  V rew;
  if (kind.tag != AlgorithmTag::GreedyModification) {
    detail::recorded_dp<Scalar>(prior, horizon, [&](const CountState& s, std::size_t) { return base_law(kind, prior, s); },
                                rew, nullptr);
    return RewardCurve<Scalar>::from_rew(prior.expected_max(), std::move(rew));
  }

  // Greedy modification: before n0 greedy and recorded; from n0 on, with
  // probability p a greedy pick that leaves the state alone, otherwise the
  // inner algorithm on a recorded step.
  const AlgorithmKind greedy = [&] {
    AlgorithmKind g = AlgorithmKind::bayes_greedy();
    g.tie_break = kind.tie_break;
    return g;
  }();
  const AlgorithmKind inner = kind.inner_kind();
  const Scalar p(kind.mix_p);
  const auto n0 = static_cast<std::size_t>(kind.switch_step);
  std::map<CountState, Scalar> dist{{CountState{}, Scalar(1)}};
  rew.resize(static_cast<Index>(horizon));
  for (std::size_t n = 1; n <= horizon; ++n) {
    Scalar r(0);
    std::map<CountState, Scalar> next;
    for (const auto& [s, mass] : dist) {
      const V means = detail::posterior_means(prior, s);
      const V g = base_law(greedy, prior, s);
      if (n < n0) {
        r += mass * detail::law_reward(g, means);
        if (n < horizon) detail::push_transitions(next, s, mass, g, means);
        continue;
      }
      const V in = base_law(inner, prior, s);
      r += mass * (p * detail::law_reward(g, means) + (Scalar(1) - p) * detail::law_reward(in, means));
      if (n < horizon) {
        next[s] += mass * p;
        detail::push_transitions(next, s, mass * (Scalar(1) - p), in, means);
      }
    }
    rew(static_cast<Index>(n - 1)) = r;
    dist = std::move(next);
  }
  return RewardCurve<Scalar>::from_rew(prior.expected_max(), std::move(rew));
}

/// The greedy modification's data process (greedy before n0, then the inner
/// algorithm, every step recorded) and the greedy step computed on that data.
template <typename Scalar>
struct GreedyStepCurves {
  RewardCurve<Scalar> data;    // rew_1(m)
  RewardCurve<Scalar> greedy;  // rew^gr(m): greedy pick after m-1 data points
};

template <typename Scalar>
GreedyStepCurves<Scalar> greedy_step_curves(const AlgorithmKind& kind, const FiniteSupportPrior<Scalar>& prior,
                                            std::size_t horizon) {
  if (kind.tag != AlgorithmTag::GreedyModification) throw ConfigError("greedy_step_curves needs a greedy modification");
  kind.validate();
  check_guard(prior.arms(), horizon);
  AlgorithmKind greedy = AlgorithmKind::bayes_greedy();
  greedy.tie_break = kind.tie_break;
  const AlgorithmKind inner = kind.inner_kind();
  const auto n0 = static_cast<std::size_t>(kind.switch_step);
  detail::Vec<Scalar> rew;
  detail::Vec<Scalar> gr;
  detail::recorded_dp<Scalar>(
      prior, horizon,
      [&](const CountState& s, std::size_t n) { return base_law(n < n0 ? greedy : inner, prior, s); }, rew, &gr);
  const Scalar best = prior.expected_max();
  return {RewardCurve<Scalar>::from_rew(best, std::move(rew)), RewardCurve<Scalar>::from_rew(best, std::move(gr))};
}

/// Greedy-modification curve assembled from the mixture
/// BIR_2(n) = E[(1-p) BIR_1(M) + p BIR^gr(M)], M = data points before step n
/// plus one, with M - n0 ~ Binomial(n - n0, 1 - p) from n0 on.
template <typename Scalar>
RewardCurve<Scalar> greedy_mod_curve_by_decomposition(const AlgorithmKind& kind, const FiniteSupportPrior<Scalar>& prior,
                                                      std::size_t horizon) {
  const GreedyStepCurves<Scalar> parts = greedy_step_curves(kind, prior, horizon);
  const auto n0 = static_cast<std::size_t>(kind.switch_step);
  const Scalar p(kind.mix_p);
  detail::Vec<Scalar> rew(static_cast<Index>(horizon));
  for (std::size_t n = 1; n <= horizon; ++n) {
    if (n < n0) {
      rew(static_cast<Index>(n - 1)) = parts.data.rew_at(static_cast<Index>(n));
      continue;
    }
    // binomial pmf over j = recorded steps among n0..n-1
    const std::size_t trials = n - n0;
    detail::Vec<Scalar> pmf = detail::Vec<Scalar>::Zero(static_cast<Index>(trials + 1));
    pmf(0) = Scalar(1);
    for (std::size_t i = 0; i < trials; ++i) {
      for (std::size_t j = i + 1; j > 0; --j) {
        pmf(static_cast<Index>(j)) = pmf(static_cast<Index>(j)) * p + pmf(static_cast<Index>(j - 1)) * (Scalar(1) - p);
      }
      pmf(0) *= p;
    }
    Scalar r(0);
    for (std::size_t j = 0; j <= trials; ++j) {
      const auto m = static_cast<Index>(n0 + j);
      r += pmf(static_cast<Index>(j)) * ((Scalar(1) - p) * parts.data.rew_at(m) + p * parts.greedy.rew_at(m));
    }
    rew(static_cast<Index>(n - 1)) = r;
  }
  return RewardCurve<Scalar>::from_rew(prior.expected_max(), std::move(rew));
}

namespace detail {

/// Law at local step n given the counts of the history. For the greedy
/// modification this is only a function of the counts up to n0: later, the
/// hidden record/skip coins make it history-dependent.
template <typename Scalar>
Vec<Scalar> law_for_deviation(const AlgorithmKind& kind, const FiniteSupportPrior<Scalar>& prior, const CountState& s,
                              std::size_t n) {
  if (kind.tag != AlgorithmTag::GreedyModification) return base_law(kind, prior, s);
  AlgorithmKind greedy = AlgorithmKind::bayes_greedy();
  greedy.tie_break = kind.tie_break;
  const auto n0 = static_cast<std::size_t>(kind.switch_step);
  if (n < n0) return base_law(greedy, prior, s);
  if (n == n0) {
    const Scalar p(kind.mix_p);
    return p * base_law(greedy, prior, s) + (Scalar(1) - p) * base_law(kind.inner_kind(), prior, s);
  }
  throw std::domain_error(
      fmt::format("{} is not count-determined past its switch step {}", kind.name(), kind.switch_step));
}

}  // namespace detail

/// First local step n <= H where the two kinds' arm laws differ on some
/// history both reach with positive probability.
template <typename Scalar>
std::optional<std::size_t> deviation_step(const AlgorithmKind& a, const AlgorithmKind& b,
                                          const FiniteSupportPrior<Scalar>& prior, std::size_t horizon) {
  a.validate();
  b.validate();
  check_guard(prior.arms(), horizon);
  std::set<CountState> common{CountState{}};
  for (std::size_t n = 1; n <= horizon; ++n) {
    std::set<CountState> next;
    for (const CountState& s : common) {
      const auto la = detail::law_for_deviation(a, prior, s, n);
      const auto lb = detail::law_for_deviation(b, prior, s, n);
      if ((la - lb).cwiseAbs().maxCoeff() > Scalar(kTieTolerance)) return n;
      for (Index arm = 0; arm < la.size(); ++arm) {
        if (la(arm) <= Scalar(0)) continue;
        next.insert(s.with(static_cast<std::size_t>(arm), 1));
        next.insert(s.with(static_cast<std::size_t>(arm), 0));
      }
    }
    common = std::move(next);
  }
  return std::nullopt;
}

}  // namespace compete::exact
