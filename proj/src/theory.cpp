#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "compete/exact.hpp"
#include "compete/harness.hpp"

namespace compete {

namespace {

using exact::ChoiceDynamics;
using exact::FiniteSupportPrior;
using exact::RangeReport;
using exact::RewardCurve;

FiniteSupportPrior<double> config_prior(const TheoryConfig& cfg) {
  using V = FiniteSupportPrior<double>::Vector;
  V s(static_cast<Index>(cfg.support.size()));
  for (std::size_t j = 0; j < cfg.support.size(); ++j) s(static_cast<Index>(j)) = cfg.support[j];
  std::vector<FiniteSupportPrior<double>::Arm> arms;
  for (const auto& w : cfg.weights) {
    if (w.size() != cfg.support.size()) throw ConfigError("theory weights must match the support size");
    V v(static_cast<Index>(w.size()));
    for (std::size_t j = 0; j < w.size(); ++j) v(static_cast<Index>(j)) = w[j];
    arms.push_back({s, v});
  }
  return FiniteSupportPrior<double>(std::move(arms));
}

/// bir(n) = c / n^(1/k) under a best-arm mean of 1.
RewardCurve<double> power_curve(double c, double k, std::size_t horizon) {
  Eigen::VectorXd bir(static_cast<Index>(horizon));
  for (std::size_t n = 1; n <= horizon; ++n) bir(static_cast<Index>(n - 1)) = c / std::pow(static_cast<double>(n), 1.0 / k);
  return RewardCurve<double>::from_bir(1.0, std::move(bir));
}

std::string range_text(const RangeReport& r) {
  if (r.holds_everywhere()) return fmt::format("holds on [{},{}]", r.first, r.last);
  return fmt::format("first failure at {}", *r.first_failure);
}

/// p_t: 1/2 before n0, `after` from n0 on, over [1, T].
bool two_phase(const ChoiceDynamics<double>& d, std::size_t n0, double after, std::string& detail) {
  const auto T = static_cast<std::size_t>(d.rounds());
  const RangeReport before = n0 > 1 ? exact::check_choice_prob(d, 0.5, 1, n0 - 1) : RangeReport{1, 0, {}, {}};
  const RangeReport post = exact::check_choice_prob(d, after, n0, T);
  detail += n0 > 1 ? fmt::format("n0={} before:{} after:{}; ", n0, range_text(before), range_text(post))
                    : fmt::format("n0=1 {}; ", range_text(post));
  return before.holds_everywhere() && post.holds_everywhere();
}

struct Suite {
  const TheoryConfig& cfg;
  FiniteSupportPrior<double> prior;
  TheoryReport report;
  std::vector<std::pair<std::string, RewardCurve<double>>> curves;
  std::vector<std::pair<std::string, ChoiceDynamics<double>>> dynamics;

  explicit Suite(const TheoryConfig& c) : cfg(c), prior(config_prior(c)) {}

  AlgorithmKind greedy_mod_ts() const {
    return AlgorithmKind::greedy_modification(AlgorithmTag::ThompsonSampling, cfg.mix_p, cfg.switch_step);
  }

  void add(std::string name, bool passed, std::string detail) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
  }

  template <typename F>
  void guarded(const std::string& name, F&& f) {
    try {
      f();
    } catch (const GuardError&) {
      throw;
    } catch (const std::exception& e) {
      add(name, false, fmt::format("error: {}", e.what()));
    }
  }

  void greedy_beats_deviator(bool swap) {
    guarded("greedy_beats_deviator_hardmax", [&] {
      const std::size_t H = cfg.horizon;
      const auto dg = exact::exact_reward_curve(AlgorithmKind::bayes_greedy(), prior, H);
      curves.emplace_back("dg", dg);
      bool ok = true;
      std::string detail;
      for (const auto& [label, kind] : {std::pair{std::string("eg"), AlgorithmKind::epsilon_greedy(cfg.epsilon)},
                                        std::pair{std::string("gm"), greedy_mod_ts()}}) {
        const auto n0 = exact::deviation_step(AlgorithmKind::bayes_greedy(), kind, prior, H);
        if (!n0) {
          ok = false;
          detail += fmt::format("{} never deviates; ", kind.name());
          continue;
        }
        const auto other = exact::exact_reward_curve(kind, prior, H);
        curves.emplace_back(label, other);
        auto d = swap ? exact::pmr_dynamics(other, dg, ResponseFunction::hard_max(), H)
                      : exact::pmr_dynamics(dg, other, ResponseFunction::hard_max(), H);
        ok = two_phase(d, *n0, 1.0, detail) && ok;
        dynamics.emplace_back(swap ? label + "_vs_dg" : "dg_vs_" + label, std::move(d));
      }
      add("greedy_beats_deviator_hardmax", ok, detail);
    });
  }

  void reward_drop() {
    guarded("reward_drop_at_deviation", [&] {
      bool ok = true;
      std::string detail;
      for (const auto& kind : {AlgorithmKind::epsilon_greedy(cfg.epsilon), AlgorithmKind::thompson(), greedy_mod_ts()}) {
        const auto r = exact::check_deviation_reward_drop(kind, prior, cfg.horizon);
        ok = ok && r.strict;
        detail += fmt::format("{}: n0={} gap={:.3e}; ", kind.name(), r.n0, r.rew_greedy - r.rew_other);
      }
      add("reward_drop_at_deviation", ok, detail);
    });
  }

  void static_biased_ties() {
    guarded("static_wins_biased_ties", [&] {
      const std::size_t H = cfg.horizon;
      const auto sg = exact::exact_reward_curve(AlgorithmKind::static_greedy(), prior, H);
      curves.emplace_back("sg", sg);
      bool ok = true;
      std::string detail;
      for (const auto& kind : {AlgorithmKind::bayes_greedy(), AlgorithmKind::thompson()}) {
        const auto d = exact::pmr_dynamics(sg, exact::exact_reward_curve(kind, prior, H), ResponseFunction::hard_max(1.0), H);
        const auto r = exact::check_choice_prob(d, 1.0, 1, H);
        ok = ok && r.holds_everywhere();
        detail += fmt::format("vs {}: {}; ", kind.name(), range_text(r));
      }
      add("static_wins_biased_ties", ok, detail);
    });
  }

  /// Dominance threshold and the HardMax&Random outcome for curves (c1, c2).
  bool dominant_curve(const RewardCurve<double>& c1, const RewardCurve<double>& c2, std::string& detail,
                      ChoiceDynamics<double>* keep) {
    const std::size_t T = cfg.synthetic_horizon;
    const auto f = ResponseFunction::hard_max_random(cfg.synthetic_hmr_epsilon);
    const double eps0 = f.baseline();
    const auto dom = exact::check_bir_dominance(c1.bir, c2.bir, eps0, 1, T);
    const auto small = exact::check_small_bir(c2.bir, eps0, 1, T);
    if (!dom.from || !small.from) {
      detail += fmt::format("no threshold below {} (dominance {}, small bir {})", T, range_text(dom), range_text(small));
      return false;
    }
    const std::size_t start = std::max(*dom.from, *small.from);
    auto d = exact::pmr_dynamics(c1, c2, f, T);
    const auto r = exact::check_choice_prob(d, 1.0 - eps0, start, T);
    detail += fmt::format("threshold {}; p_t = {} {}", start, 1.0 - eps0, range_text(r));
    if (keep) *keep = std::move(d);
    return r.holds_everywhere();
  }

  void dominant_curve_wins() {
    guarded("dominant_curve_wins_hmr", [&] {
      const std::size_t T = cfg.synthetic_horizon;
      const auto c1 = power_curve(cfg.synthetic_c1, 2.0, T);
      const auto c2 = power_curve(cfg.synthetic_c2, 3.0, T);
      std::string detail;
      ChoiceDynamics<double> d;
      const bool ok = dominant_curve(c1, c2, detail, &d);
      curves.emplace_back("synthetic_sqrt", c1);
      curves.emplace_back("synthetic_cbrt", c2);
      dynamics.emplace_back("synthetic_hmr", std::move(d));
      add("dominant_curve_wins_hmr", ok, detail);
    });
    guarded("swapped_curves_control", [&] {
      const std::size_t T = cfg.synthetic_horizon;
      std::string detail;
      const bool swapped =
          dominant_curve(power_curve(cfg.synthetic_c2, 3.0, T), power_curve(cfg.synthetic_c1, 2.0, T), detail, nullptr);
      add("swapped_curves_control", !swapped, "swapped curves: " + detail);
    });
  }

  void greedy_mod_wins() {
    guarded("greedy_mod_wins_hmr", [&] {
      const std::size_t H = cfg.horizon;
      const auto f = ResponseFunction::hard_max_random(cfg.hmr_epsilon);
      const double eps0 = f.baseline();
      const AlgorithmKind eg = AlgorithmKind::epsilon_greedy(cfg.epsilon);
      const auto bg_ts = exact::deviation_step(AlgorithmKind::bayes_greedy(), AlgorithmKind::thompson(), prior, H);
      if (!bg_ts) throw std::domain_error("ts never deviates from dg");
      const std::vector<std::pair<AlgorithmKind, AlgorithmKind>> cases{
          {eg, AlgorithmKind::greedy_modification(AlgorithmTag::BayesEpsilonGreedy, cfg.mix_p, 1, cfg.epsilon)},
          {AlgorithmKind::thompson(), AlgorithmKind::greedy_modification(AlgorithmTag::ThompsonSampling, cfg.mix_p,
                                                                         static_cast<int>(*bg_ts))}};
      bool ok = true;
      std::string detail;
      for (const auto& [base, mod] : cases) {
        const auto n0 = exact::deviation_step(base, mod, prior, H);
        if (!n0) {
          ok = false;
          detail += fmt::format("{} never deviates; ", mod.name());
          continue;
        }
        const auto d = exact::pmr_dynamics(exact::exact_reward_curve(base, prior, H),
                                           exact::exact_reward_curve(mod, prior, H), f, H);
        detail += fmt::format("{}: ", mod.name());
        ok = two_phase(d, *n0, eps0, detail) && ok;
      }
      add("greedy_mod_wins_hmr", ok, detail);
    });
  }

  void monotone() {
    guarded("monotone_curves", [&] {
      bool ok = true;
      std::string detail;
      for (const auto& kind : {AlgorithmKind::bayes_greedy(), AlgorithmKind::epsilon_greedy(cfg.epsilon),
                               AlgorithmKind::thompson(), AlgorithmKind::static_greedy()}) {
        const auto r = exact::check_monotone(exact::exact_reward_curve(kind, prior, cfg.monotone_horizon));
        ok = ok && r.monotone;
        detail += r.monotone ? fmt::format("{} monotone; ", kind.name())
                             : fmt::format("{} drops at {}; ", kind.name(), *r.first_violation);
      }
      add("monotone_curves", ok, detail);
    });
  }

  void perturbed_distinct() {
    guarded("perturbed_prior_distinct", [&] {
      const auto sym = exact::symmetric_prior<double>(prior.arms(), cfg.support, cfg.weights.front());
      RngStream rng(1, hash_name("perturb"));
      const auto q = exact::perturb_prior(sym, cfg.perturb_scale, rng);
      const auto a = exact::audit_distinct_posteriors(q, cfg.audit_horizon);
      add("perturbed_prior_distinct", a.passed,
          fmt::format("{} states, min gap {:.3e}", a.states, a.min_gap));
    });
  }

  void decomposition() {
    guarded("greedy_mod_decomposition", [&] {
      const auto kind = greedy_mod_ts();
      const auto dp = exact::exact_reward_curve(kind, prior, cfg.horizon);
      const auto mix = exact::greedy_mod_curve_by_decomposition(kind, prior, cfg.horizon);
      const double gap = (dp.rew - mix.rew).cwiseAbs().maxCoeff();
      curves.emplace_back("gm_decomposition", mix);
      add("greedy_mod_decomposition", gap <= 1e-12, fmt::format("max gap {:.3e}", gap));
    });
  }

  void softmax_direction() {
    guarded("softmax_direction", [&] {
      const std::size_t T = cfg.synthetic_horizon;
      const auto c1 = power_curve(cfg.synthetic_c1, 2.0, T);
      const auto c2 = power_curve(cfg.synthetic_c2, 3.0, T);
      const auto f = ResponseFunction::soft_max(cfg.softmax_base);
      const SoftMaxConstants k = softmax_constants(f, cfg.softmax_delta0);
      const double alpha0 = 0.25;
      const double beta0 = 0.25;
      const auto weak = exact::check_weak_bir_dominance(c1.bir, c2.bir, alpha0, beta0, 1, T);
      if (!weak.from) {
        add("softmax_direction", false, "weak dominance never settles: " + range_text(weak));
        return;
      }
      auto d = exact::pmr_dynamics(c1, c2, f, T);
      const auto r = exact::check_softmax_direction(d, c2.bir, k.c0, alpha0, *weak.from, T);
      dynamics.emplace_back("synthetic_softmax", std::move(d));
      add("softmax_direction", r.holds_everywhere(),
          fmt::format("c0={:.4f} from {}: {}", k.c0, *weak.from, range_text(r)));
    });
  }
};

void run_all(Suite& s, bool swap) {
  s.greedy_beats_deviator(swap);
  s.reward_drop();
  s.static_biased_ties();
  s.dominant_curve_wins();
  s.greedy_mod_wins();
  s.monotone();
  s.perturbed_distinct();
  s.decomposition();
  s.softmax_direction();
}

std::string csv_field(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
  }
  return s;
}

}  // namespace

bool TheoryReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

const TheoryCheck& TheoryReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range(fmt::format("no theory check '{}'", name));
}

TheoryReport run_theory_suite(const TheoryConfig& cfg, bool swap_hardmax) {
  Suite s(cfg);
  run_all(s, swap_hardmax);
  return std::move(s.report);
}

TheoryReport run_theory_plan(const ExperimentPlan& plan, bool write) {
  plan.validate();
  if (plan.experiment != Experiment::Theory) throw ConfigError("run_theory_plan takes theory plans");
  Suite s(plan.theory);
  run_all(s, false);
  s.report.plan_hash = plan_hash(plan);
  if (!write) return std::move(s.report);
  std::filesystem::create_directories(plan.output);
  for (const auto& [name, c] : s.curves) {
    std::ofstream out(plan.output / fmt::format("curve_{}.csv", name));
    exact::write_curve_csv(out, c);
  }
  for (const auto& [name, d] : s.dynamics) {
    std::ofstream out(plan.output / fmt::format("dynamics_{}.csv", name));
    exact::write_dynamics_csv(out, d);
  }
  std::ofstream out(plan.output / "theory_report.csv");
  out << "plan_hash,check,passed,detail\n";
  for (const auto& c : s.report.checks) {
    out << fmt::format("{},{},{},{}\n", s.report.plan_hash, c.name, c.passed ? 1 : 0, csv_field(c.detail));
  }
  return std::move(s.report);
}

}  // namespace compete
