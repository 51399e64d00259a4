#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <fmt/format.h>

#include "compete/exact/prior.hpp"
#include "compete/exact/reward_curve.hpp"
#include "compete/rng.hpp"

namespace compete::exact {

/// Adds to each arm's weights an independent draw from the uniform law on the
/// zero-sum ball of radius `scale`, then renormalises.
template <typename Scalar>
FiniteSupportPrior<Scalar> perturb_prior(const FiniteSupportPrior<Scalar>& prior, double scale, RngStream& rng) {
  if (!(scale >= 0.0)) throw ConfigError("perturbation scale must be non-negative");
  using Arm = typename FiniteSupportPrior<Scalar>::Arm;
  using V = typename FiniteSupportPrior<Scalar>::Vector;
  std::vector<Arm> arms;
  for (std::size_t a = 0; a < prior.arms(); ++a) {
    Arm x = prior.arm(a);
    const Index d = x.weights.size();
    if (scale == 0.0 || d < 2) {
      arms.push_back(std::move(x));
      continue;
    }
    // Isotropic direction inside the (d-1)-dim zero-sum subspace; radius
    // scale * U^(1/(d-1)) makes the point uniform on the ball.
    Eigen::VectorXd z(d);
    double norm = 0.0;
    do {
      for (Index j = 0; j < d; ++j) z(j) = rng.normal();
      z.array() -= z.mean();
      norm = z.norm();
    } while (norm == 0.0);
    const double radius = scale * std::pow(rng.uniform(), 1.0 / static_cast<double>(d - 1));
    const V noise = (z * (radius / norm)).template cast<Scalar>();
    V w = x.weights + noise;
    for (Index j = 0; j < d; ++j) {
      if (!(w(j) > Scalar(0) && w(j) < Scalar(1))) {
        throw ConfigError(fmt::format("perturbation scale {} pushes arm {} weights outside (0,1)", scale, a));
      }
    }
    x.weights = w / w.sum();
    arms.push_back(std::move(x));
  }
  return FiniteSupportPrior<Scalar>(std::move(arms));
}

struct DistinctnessAudit {
  bool passed = true;
  std::size_t states = 0;
  double min_gap = 0.0;
  std::optional<CountState> first_failure;
};

/// Checks that at every count state with at most H-1 observations the
/// posterior means of all arms are pairwise more than `tolerance` apart.
template <typename Scalar>
DistinctnessAudit audit_distinct_posteriors(const FiniteSupportPrior<Scalar>& prior, std::size_t horizon,
                                            double tolerance = 1e-9) {
  check_guard(prior.arms(), horizon);
  const std::size_t k = prior.arms();
  const int budget = static_cast<int>(horizon) - 1;
  // means[a][h][t]
  std::vector<std::vector<std::vector<double>>> means(k);
  for (std::size_t a = 0; a < k; ++a) {
    means[a].assign(static_cast<std::size_t>(budget + 1), std::vector<double>(static_cast<std::size_t>(budget + 1), 0.0));
    for (int h = 0; h <= budget; ++h) {
      for (int t = 0; h + t <= budget; ++t) {
        means[a][static_cast<std::size_t>(h)][static_cast<std::size_t>(t)] =
            static_cast<double>(prior.posterior_mean(a, h, t));
      }
    }
  }
  DistinctnessAudit audit;
  audit.min_gap = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> counts(k, {0, 0});
  // Walk every (h_a, t_a) assignment with total <= budget.
  auto visit = [&](auto&& self, std::size_t a, int left, CountState s) -> void {
    if (a == k) {
      ++audit.states;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          const double gap =
              std::abs(means[i][static_cast<std::size_t>(counts[i].first)][static_cast<std::size_t>(counts[i].second)] -
                       means[j][static_cast<std::size_t>(counts[j].first)][static_cast<std::size_t>(counts[j].second)]);
          audit.min_gap = std::min(audit.min_gap, gap);
          if (gap <= tolerance && audit.passed) {
            audit.passed = false;
            audit.first_failure = s;
          }
        }
      }
      return;
    }
    for (int h = 0; h <= left; ++h) {
      for (int t = 0; h + t <= left; ++t) {
        counts[a] = {h, t};
        CountState next = s;
        for (int i = 0; i < h; ++i) next = next.with(a, 1);
        for (int i = 0; i < t; ++i) next = next.with(a, 0);
        self(self, a + 1, left - h - t, next);
      }
    }
  };
  visit(visit, 0, budget, CountState{});
  if (k < 2) audit.min_gap = 0.0;
  return audit;
}

}  // namespace compete::exact
