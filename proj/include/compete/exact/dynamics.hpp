#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include <Eigen/Core>
#include <fmt/format.h>

#include "compete/choice.hpp"
#include "compete/exact/reward_curve.hpp"

namespace compete::exact {

/// Probability of choosing firm 1 at estimate gap `delta`, evaluated in Scalar.
/// Gaps within kTieTolerance count as ties.
template <typename Scalar>
Scalar response_prob(const ResponseFunction& f, Scalar delta) {
  const Scalar tol(kTieTolerance);
  const Scalar q(f.tie_prob);
  const Scalar hard = delta > tol ? Scalar(1) : (delta < -tol ? Scalar(0) : q);
  switch (f.tag) {
    case ResponseTag::HardMax:
      return hard;
    case ResponseTag::HardMaxRandom: {
      const Scalar eps(f.epsilon);
      return eps / Scalar(2) + (Scalar(1) - eps) * hard;
    }
    case ResponseTag::SoftMax: {
      using std::pow;
      return Scalar(1) / (Scalar(1) + pow(Scalar(f.base), -delta));
    }
  }
  return hard;
}

/// Per global round t (stored 0-based): p_t, PMR_1(t), PMR_2(t) and the law
/// of n_1(t), the number of earlier agents that chose firm 1.
template <typename Scalar>
struct ChoiceDynamics {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector p;
  Vector pmr1;
  Vector pmr2;
  std::vector<Vector> n1;  // n1[t-1](m) = Pr[n_1(t) = m], m = 0..t-1

  Index rounds() const noexcept { return p.size(); }
  Scalar p_at(Index t) const { return p(t - 1); }
};

template <typename Scalar>
ChoiceDynamics<Scalar> pmr_dynamics(const RewardCurve<Scalar>& curve1, const RewardCurve<Scalar>& curve2,
                                    const ResponseFunction& f, std::size_t rounds) {
  f.validate();
  const auto T = static_cast<Index>(rounds);
  if (curve1.horizon() < T || curve2.horizon() < T) {
    throw std::out_of_range(fmt::format("curves cover {} and {} steps, dynamics need {}", curve1.horizon(),
                                        curve2.horizon(), rounds));
  }
  using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  ChoiceDynamics<Scalar> d;
  d.p.resize(T);
  d.pmr1.resize(T);
  d.pmr2.resize(T);
  d.n1.reserve(rounds);
  V dist = V::Ones(1);
  for (Index t = 1; t <= T; ++t) {
    Scalar pmr1(0);
    Scalar pmr2(0);
    for (Index m = 0; m < t; ++m) {
      pmr1 += dist(m) * curve1.rew_at(m + 1);
      pmr2 += dist(m) * curve2.rew_at(t - m);
    }
    const Scalar pt = response_prob<Scalar>(f, pmr1 - pmr2);
    d.p(t - 1) = pt;
    d.pmr1(t - 1) = pmr1;
    d.pmr2(t - 1) = pmr2;
    d.n1.push_back(dist);
    V next = V::Zero(t + 1);
    next.head(t) += (Scalar(1) - pt) * dist;
    next.tail(t) += pt * dist;
    dist = std::move(next);
  }
  return d;
}

template <typename Scalar>
void write_curve_csv(std::ostream& out, const RewardCurve<Scalar>& c) {
  out << "n,rew,bir\n";
  for (Index n = 1; n <= c.horizon(); ++n) {
    out << fmt::format("{},{},{}\n", n, static_cast<double>(c.rew_at(n)), static_cast<double>(c.bir_at(n)));
  }
}

template <typename Scalar>
void write_dynamics_csv(std::ostream& out, const ChoiceDynamics<Scalar>& d) {
  out << "t,p,pmr1,pmr2\n";
  for (Index t = 1; t <= d.rounds(); ++t) {
    out << fmt::format("{},{},{},{}\n", t, static_cast<double>(d.p(t - 1)), static_cast<double>(d.pmr1(t - 1)),
                       static_cast<double>(d.pmr2(t - 1)));
  }
}

}  // namespace compete::exact
