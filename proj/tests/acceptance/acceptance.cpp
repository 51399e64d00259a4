// End-to-end acceptance checks. Each criterion prints one line:
//   criterion <n> <name>: PASS|FAIL  <measured values>
// --expect-fail inverts the exit code only; the printed verdict stays honest.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "compete/exact.hpp"
#include "compete/harness.hpp"
#include "oracles/brute_force.hpp"

using namespace compete;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

struct Options {
  std::size_t N = 300;
  fs::path scratch;
};

ExperimentPlan shipped(const std::string& name, const Options& opt) {
  auto p = load_plan(fs::path(COMPETE_SOURCE_DIR) / "plans" / (name + ".plan"));
  p.N = opt.N;
  p.output = opt.scratch / name;
  return p;
}

const CellResult& cell(const ResultSet& rs, std::string_view instance, std::vector<std::string> firms,
                       std::size_t T, std::size_t T0, Variant v = Variant::Standard) {
  for (const auto& c : rs.cells) {
    if (c.instance == instance && c.firms == firms && c.game.T == T && c.game.T0 == T0 && c.game.variant == v) return c;
  }
  throw std::runtime_error(fmt::format("missing cell {} {}", instance, fmt::join(firms, "-")));
}

std::string pm(const AggregateStat& s) { return fmt::format("{:.3f}+-{:.3f}", s.mean, s.ci95_halfwidth); }

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

Verdict simultaneous_entry_shares(const Options& o) {
  auto p = shipped("simultaneous_entry", o);
  p.instances = {InstanceKind{InstanceTag::NeedleInHaystack}, InstanceKind{InstanceTag::HeavyTail}};
  p.T0 = {20, 500};
  p.pairs = {{"ts", "dg"}};
  const auto rs = run_plan(p, false);
  Verdict v;
  const auto& ht20 = cell(rs, "heavy_tail", {"ts", "dg"}, 2000, 20).share[0];
  const auto& ht500 = cell(rs, "heavy_tail", {"ts", "dg"}, 2000, 500).share[0];
  const auto& nd20 = cell(rs, "needle", {"ts", "dg"}, 2000, 20).share[0];
  v.require(near(ht20.mean, 0.31, 0.07), "heavy_tail T0=20 ts share " + pm(ht20) + " want 0.31+-0.07");
  v.require(near(ht500.mean, 0.75, 0.05), "heavy_tail T0=500 ts share " + pm(ht500) + " want 0.75+-0.05");
  v.require(near(nd20.mean, 0.68, 0.06), "needle T0=20 ts share " + pm(nd20) + " want 0.68+-0.06");
  return v;
}

Verdict death_spiral_eeog(const Options& o) {
  auto p = shipped("simultaneous_entry", o);
  p.instances = {InstanceKind{InstanceTag::HeavyTail}};
  p.T0 = {20};
  p.pairs = {{"ts", "dg"}};
  const auto& e = cell(run_plan(p, false), "heavy_tail", {"ts", "dg"}, 2000, 20).eeog;
  Verdict v;
  v.require(e.median == 0.0, fmt::format("median eeog {}", e.median));
  v.require(e.mean <= 150.0, fmt::format("mean eeog {:.1f} want <= 150", e.mean));
  return v;
}

Verdict first_mover_incumbent_ts(const Options& o) {
  auto p = shipped("first_mover_x200", o);
  p.instances = {InstanceKind{InstanceTag::HeavyTail}};
  const auto rs = run_plan(p, false);
  Verdict v;
  // firm 0 incumbent, firm 1 entrant
  const auto& tt = cell(rs, "heavy_tail", {"ts", "ts"}, 2000, 20).share[1];
  v.require(tt.mean <= 0.05, "entrant ts vs incumbent ts " + pm(tt) + " want <= 0.05");
  for (const std::string entrant : {"ts", "deg", "dg"}) {
    std::string arg;
    double low = 2.0;
    std::string row;
    for (const std::string inc : {"ts", "deg", "dg"}) {
      const double s = cell(rs, "heavy_tail", {inc, entrant}, 2000, 20).share[1].mean;
      row += fmt::format("{}{}={:.3f}", row.empty() ? "" : " ", inc, s);
      if (s < low) {
        low = s;
        arg = inc;
      }
    }
    v.require(arg == "ts", fmt::format("entrant {} lowest vs incumbent {} ({})", entrant, arg, row));
  }
  return v;
}

Verdict hmr_share_growth(const Options& o) {
  auto p = shipped("hmr_eps01", o);
  p.instances = {InstanceKind{InstanceTag::HeavyTail}};
  p.pairs = {{"ts", "dg"}};
  const auto rs = run_plan(p, false);
  auto hm = shipped("simultaneous_entry", o);
  hm.instances = {InstanceKind{InstanceTag::HeavyTail}};
  hm.T0 = {20};
  hm.pairs = {{"ts", "dg"}};
  const auto hard = cell(run_plan(hm, false), "heavy_tail", {"ts", "dg"}, 2000, 20).share[0];
  Verdict v;
  const std::array<std::size_t, 3> Ts{2000, 5000, 10000};
  const std::array<double, 3> want{0.43, 0.66, 0.76};
  double prev = -1.0;
  bool rising = true;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& s = cell(rs, "heavy_tail", {"ts", "dg"}, Ts[k], 20).share[0];
    v.require(near(s.mean, want[k], 0.07),
              fmt::format("T={} ts share {} var {:.3f} want {:.2f}+-0.07", Ts[k], pm(s), s.variance, want[k]));
    rising = rising && s.mean > prev;
    prev = s.mean;
  }
  v.require(rising, "share rises with T");
  const auto& h2000 = cell(rs, "heavy_tail", {"ts", "dg"}, 2000, 20).share[0];
  v.require(h2000.variance < hard.variance,
            fmt::format("T=2000 variance hmr {:.3f} < hardmax {:.3f}", h2000.variance, hard.variance));
  return v;
}

Verdict data_beats_reputation_advantage(const Options& o) {
  auto p = shipped("advantage", o);
  p.instances = {InstanceKind{InstanceTag::HeavyTail}};
  p.pairs = {{"ts", "ts"}};
  p.variants = {Variant::DataAdvantageOnly, Variant::ReputationAdvantageOnly};
  const auto rs = run_plan(p, false);
  const auto& d = cell(rs, "heavy_tail", {"ts", "ts"}, 2000, 20, Variant::DataAdvantageOnly).share[1];
  const auto& r = cell(rs, "heavy_tail", {"ts", "ts"}, 2000, 20, Variant::ReputationAdvantageOnly).share[1];
  Verdict v;
  v.require(d.mean < r.mean && r.mean < 0.5, "entrant share data-only " + pm(d) + " < reputation-only " + pm(r) + " < 0.5");
  v.require(d.mean <= 0.06 && r.mean <= 0.06, "both <= 0.06");
  return v;
}

// a >= b within one combined CI width
bool at_least(const Trajectory& a, const Trajectory& b, Index t) {
  return a.value(t) >= b.value(t) - std::hypot(a.ci95(t), b.ci95(t));
}

bool dips(const Trajectory& rel, Index upto) {
  for (Index t = 0; t < std::min(upto, rel.size()); ++t) {
    if (rel.value(t) + rel.ci95(t) < 0.5) return true;
  }
  return false;
}

Verdict isolation_ordering_and_dips(const Options& o) {
  auto p = shipped("isolation", o);
  p.relative = {{"ts", "dg"}};
  const auto r = run_isolation(p, false);
  Verdict v;
  for (const std::string inst : {"needle", "uniform", "heavy_tail"}) {
    const auto& ts = r.find(inst, "ts").reward;
    const auto& deg = r.find(inst, "deg").reward;
    const auto& dg = r.find(inst, "dg").reward;
    const Index last = ts.size() - 1;
    v.require(at_least(ts, deg, last) && at_least(deg, dg, last),
              fmt::format("{} final reward ts {:.3f} deg {:.3f} dg {:.3f}", inst, ts.value(last), deg.value(last),
                          dg.value(last)));
  }
  for (const std::string inst : {"uniform", "heavy_tail", "needle"}) {
    const auto& rel = r.find_relative(inst, "ts", "dg").trajectory;
    Index at = 0;
    for (Index t = 1; t < std::min<Index>(500, rel.size()); ++t) {
      if (rel.value(t) + rel.ci95(t) < rel.value(at) + rel.ci95(at)) at = t;
    }
    const bool want_dip = inst != "needle";
    v.require(dips(rel, 500) == want_dip,
              fmt::format("{} ts-vs-dg {} (lowest upper band {:.3f} at round {})", inst, want_dip ? "dips" : "no dip",
                          rel.value(at) + rel.ci95(at), at + 1));
  }
  return v;
}

Verdict nfirm_welfare(const Options& o) {
  auto p = shipped("nfirms", o);
  const auto rs = run_plan(p, false);
  Verdict v;
  std::string regrets, eeogs;
  bool regret_ok = true;
  bool eeog_ok = true;
  for (std::size_t k = 0; k < rs.cells.size(); ++k) {
    const auto& c = rs.cells[k];
    regrets += fmt::format("{}{}:{:.1f}", k ? " " : "", c.firms.size(), c.regret.mean);
    eeogs += fmt::format("{}{}:{:.0f}", k ? " " : "", c.firms.size(), c.eeog.mean);
    if (k == 0) continue;
    const auto& prev = rs.cells[k - 1];
    regret_ok = regret_ok && c.regret.mean >= prev.regret.mean - std::hypot(c.regret.ci95_halfwidth, prev.regret.ci95_halfwidth);
    eeog_ok = eeog_ok && c.eeog.mean > prev.eeog.mean;
  }
  v.require(rs.cells.size() == 4, fmt::format("{} market sizes", rs.cells.size()));
  v.require(regret_ok, "regret non-decreasing " + regrets);
  v.require(eeog_ok, "eeog increasing " + eeogs);
  return v;
}

Verdict exact_theory_suite(const Options&) {
  Verdict v;
  const auto report = run_theory_suite(TheoryConfig{});
  for (const auto& c : report.checks) {
    if (!c.passed) v.require(false, c.name + ": " + c.detail);
  }
  v.require(report.all_passed(), fmt::format("{} theory checks", report.checks.size()));

  using V = exact::FiniteSupportPrior<double>::Vector;
  V s(2), a(2), b(2);
  s << 0.3, 0.8;
  a << 0.5, 0.5;
  b << 0.6, 0.4;
  const exact::FiniteSupportPrior<double> prior({{s, a}, {s, b}});
  const oracle::Prior op{{{0.3, 0.8}, {0.3, 0.8}}, {{0.5, 0.5}, {0.6, 0.4}}};
  double worst = 0.0;
  for (const auto& kind : {AlgorithmKind::bayes_greedy(), AlgorithmKind::epsilon_greedy(0.1), AlgorithmKind::thompson(),
                           AlgorithmKind::static_greedy(),
                           AlgorithmKind::greedy_modification(AlgorithmTag::ThompsonSampling, 0.5, 3),
                           AlgorithmKind::greedy_modification(AlgorithmTag::BayesEpsilonGreedy, 0.5, 1, 0.1)}) {
    const auto curve = exact::exact_reward_curve(kind, prior, 6);
    oracle::BruteForce bf(op, kind);
    const auto expect = bf.curve(6);
    for (Index n = 1; n <= 6; ++n) worst = std::max(worst, std::abs(curve.rew_at(n) - expect[static_cast<std::size_t>(n - 1)]));
  }
  v.require(worst <= 1e-10, fmt::format("dp vs path enumeration at H=6 max gap {:.1e}", worst));
  return v;
}

std::map<std::string, std::string> csvs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[e.path().filename().string()] = s.str();
  }
  return out;
}

Verdict worker_count_determinism(const Options& o) {
  unsetenv("COMPETE_WORKERS");
  Verdict v;
  for (const std::string name : {"simultaneous_entry", "isolation", "nfirms", "theory"}) {
    std::array<std::map<std::string, std::string>, 2> got;
    for (std::size_t k = 0; k < 2; ++k) {
      Options small = o;
      small.scratch = o.scratch / fmt::format("determinism_w{}", k == 0 ? 1 : 3);
      auto p = shipped(name, small);
      p.N = 24;
      p.workers = k == 0 ? 1 : 3;
      fs::remove_all(p.output);
      switch (p.experiment) {
        case Experiment::Isolation: run_isolation(p); break;
        case Experiment::Theory: run_theory_plan(p); break;
        default: run_plan(p); break;
      }
      got[k] = csvs(p.output);
    }
    v.require(!got[0].empty() && got[0] == got[1], fmt::format("{}: {} csv files identical", name, got[0].size()));
  }
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict(const Options&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  bool expect_fail = false;
  Options opt;
  opt.scratch = fs::temp_directory_path() / "compete_acceptance";
  app.add_option("--criterion", only, "criteria to run (default all)");
  app.add_option("-N,--mrvs", opt.N, "MRVs per cell");
  app.add_option("--scratch", opt.scratch, "directory for written outputs");
  app.add_flag("--expect-fail", expect_fail, "exit 0 when the criterion fails");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "simultaneous_entry_shares", simultaneous_entry_shares},
      {2, "death_spiral_eeog", death_spiral_eeog},
      {3, "first_mover_incumbent_ts", first_mover_incumbent_ts},
      {4, "hmr_share_growth", hmr_share_growth},
      {5, "data_beats_reputation_advantage", data_beats_reputation_advantage},
      {6, "isolation_ordering_and_dips", isolation_ordering_and_dips},
      {7, "nfirm_welfare", nfirm_welfare},
      {8, "exact_theory_suite", exact_theory_suite},
      {9, "worker_count_determinism", worker_count_determinism},
  };
  bool all_pass = true;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Verdict v;
    try {
      v = c.run(opt);
    } catch (const std::exception& e) {
      v.require(false, std::string("error: ") + e.what());
    }
    std::cout << fmt::format("criterion {} {}: {}  {}", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail) << std::endl;
    all_pass = all_pass && v.pass;
  }
  if (expect_fail) return all_pass ? 1 : 0;
  return all_pass ? 0 : 1;
}
