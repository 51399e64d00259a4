#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include <Eigen/Core>
#include <fmt/format.h>

#include "compete/exact/dynamics.hpp"
#include "compete/exact/reward_curve.hpp"

namespace compete::exact {

/// Condition evaluated for each n in [first, last]; `from` is the smallest n
/// such that it holds for every m in [n, last].
struct RangeReport {
  std::size_t first = 1;
  std::size_t last = 0;
  std::optional<std::size_t> from;
  std::optional<std::size_t> first_failure;

  bool holds_everywhere() const { return !first_failure.has_value(); }
};

namespace detail {

inline std::size_t scaled_index(double factor, std::size_t n) {
  const auto i = static_cast<std::size_t>(std::floor(factor * static_cast<double>(n)));
  return std::max<std::size_t>(i, 1);
}

template <typename Pred>
RangeReport scan_range(std::size_t first, std::size_t last, Pred&& pred) {
  RangeReport r;
  r.first = first;
  r.last = last;
  std::size_t start = first;
  bool tail_ok = false;
  for (std::size_t n = first; n <= last; ++n) {
    if (pred(n)) {
      if (!tail_ok) start = n;
      tail_ok = true;
    } else {
      if (!r.first_failure) r.first_failure = n;
      tail_ok = false;
    }
  }
  if (tail_ok) r.from = start;
  return r;
}

template <typename Vector>
void require_index(const Vector& v, std::size_t n, const char* what) {
  if (n < 1 || static_cast<Index>(n) > v.size()) {
    throw std::out_of_range(fmt::format("{} index {} outside 1..{}", what, n, v.size()));
  }
}

}  // namespace detail

/// BIR_1(eps0 n / 2) / BIR_2(n) < 1/2, with the fractional index floored
/// (minimum 1).
template <typename Vector>
RangeReport check_bir_dominance(const Vector& bir1, const Vector& bir2, double eps0, std::size_t first,
                                std::size_t last) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw ConfigError("eps0 must lie in (0,1)");
  return detail::scan_range(first, last, [&](std::size_t n) {
    const std::size_t i = detail::scaled_index(eps0 / 2.0, n);
    detail::require_index(bir1, i, "bir1");
    detail::require_index(bir2, n, "bir2");
    return bir1(static_cast<Index>(i - 1)) < 0.5 * bir2(static_cast<Index>(n - 1));
  });
}

/// BIR_1((1 - beta0) n) / BIR_2(n) < 1 - alpha0.
template <typename Vector>
RangeReport check_weak_bir_dominance(const Vector& bir1, const Vector& bir2, double alpha0, double beta0,
                                     std::size_t first, std::size_t last) {
  if (!(alpha0 > 0.0 && alpha0 < 0.5 && beta0 > 0.0 && beta0 < 0.5)) {
    throw ConfigError("alpha0 and beta0 must lie in (0, 1/2)");
  }
  return detail::scan_range(first, last, [&](std::size_t n) {
    const std::size_t i = detail::scaled_index(1.0 - beta0, n);
    detail::require_index(bir1, i, "bir1");
    detail::require_index(bir2, n, "bir2");
    return bir1(static_cast<Index>(i - 1)) < (1.0 - alpha0) * bir2(static_cast<Index>(n - 1));
  });
}

/// First m0 from which BIR_2(n) > 4 exp(-eps0 n / 12) holds through `last`.
template <typename Vector>
RangeReport check_small_bir(const Vector& bir2, double eps0, std::size_t first, std::size_t last) {
  return detail::scan_range(first, last, [&](std::size_t n) {
    detail::require_index(bir2, n, "bir2");
    return bir2(static_cast<Index>(n - 1)) > 4.0 * std::exp(-eps0 * static_cast<double>(n) / 12.0);
  });
}

struct MonotoneReport {
  bool monotone = true;
  /// Step n+1 of the first rew(n+1) < rew(n) - tolerance.
  std::optional<std::size_t> first_violation;
};

template <typename Scalar>
MonotoneReport check_monotone(const RewardCurve<Scalar>& c, double tolerance = 1e-10) {
  MonotoneReport r;
  for (Index n = 1; n < c.horizon(); ++n) {
    if (c.rew_at(n + 1) < c.rew_at(n) - Scalar(tolerance)) {
      r.monotone = false;
      r.first_violation = static_cast<std::size_t>(n + 1);
      break;
    }
  }
  return r;
}

template <typename Scalar>
struct DropReport {
  std::size_t n0 = 0;
  Scalar rew_greedy = Scalar(0);
  Scalar rew_other = Scalar(0);
  bool strict = false;
};

/// rew_BayesGreedy(n0) > rew_B(n0) at B's deviation step from BayesGreedy.
template <typename Scalar>
DropReport<Scalar> check_deviation_reward_drop(const AlgorithmKind& kind_b, const FiniteSupportPrior<Scalar>& prior,
                                               std::size_t horizon, double tolerance = 1e-12) {
  AlgorithmKind greedy = AlgorithmKind::bayes_greedy();
  greedy.tie_break = kind_b.tie_break;
  const auto n0 = deviation_step(greedy, kind_b, prior, horizon);
  if (!n0) throw std::domain_error(fmt::format("{} does not deviate from dg within {} steps", kind_b.name(), horizon));
  const auto cg = exact_reward_curve(greedy, prior, *n0);
  const auto cb = exact_reward_curve(kind_b, prior, *n0);
  DropReport<Scalar> r;
  r.n0 = *n0;
  r.rew_greedy = cg.rew_at(static_cast<Index>(*n0));
  r.rew_other = cb.rew_at(static_cast<Index>(*n0));
  r.strict = r.rew_greedy - r.rew_other > Scalar(tolerance);
  return r;
}

/// p_t equals `target` within `tolerance` for each t in [first, last].
template <typename Scalar>
RangeReport check_choice_prob(const ChoiceDynamics<Scalar>& d, double target, std::size_t first, std::size_t last,
                              double tolerance = 1e-10) {
  if (static_cast<Index>(last) > d.rounds()) throw std::out_of_range("dynamics shorter than audited range");
  return detail::scan_range(first, last, [&](std::size_t t) {
    using std::abs;
    return abs(d.p_at(static_cast<Index>(t)) - Scalar(target)) <= Scalar(tolerance);
  });
}

/// p_t > 1/2 + c0 alpha0 BIR_2(t) / 4 on [first, last].
template <typename Scalar, typename Vector>
RangeReport check_softmax_direction(const ChoiceDynamics<Scalar>& d, const Vector& bir2, double c0, double alpha0,
                                    std::size_t first, std::size_t last) {
  if (static_cast<Index>(last) > d.rounds()) throw std::out_of_range("dynamics shorter than audited range");
  return detail::scan_range(first, last, [&](std::size_t t) {
    detail::require_index(bir2, t, "bir2");
    const double bound = 0.5 + c0 * alpha0 * static_cast<double>(bir2(static_cast<Index>(t - 1))) / 4.0;
    return static_cast<double>(d.p_at(static_cast<Index>(t))) > bound;
  });
}

}  // namespace compete::exact
