// compete: run experiment plans and render their results.
//
//   compete run plans/simultaneous_entry.plan [--seed S] [--workers W] [--out DIR]
//   compete isolate plans/isolation.plan
//   compete theory plans/theory.plan
//   compete table out/simultaneous_entry
//   compete hash plans/advantage.plan
//
// Exit codes: 0 ok, 1 bad config, 2 exact-engine guard, 3 theory check failed.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "compete/harness.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> N;
  std::optional<std::string> out;
};

compete::ExperimentPlan prepare(const std::string& path, const Overrides& o) {
  compete::ExperimentPlan plan = compete::load_plan(path);
  if (o.seed) plan.seed = *o.seed;
  if (o.workers) plan.workers = *o.workers;
  if (o.N) plan.N = *o.N;
  if (o.out) plan.output = *o.out;
  return plan;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("-N,--mrvs", o.N, "number of mean-reward vectors");
  cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"competing bandits simulator"};
  app.require_subcommand(1);
  std::string path;
  Overrides o;

  auto* run = app.add_subcommand("run", "duopoly or n-firm plan");
  run->add_option("plan", path)->required()->check(CLI::ExistingFile);
  add_overrides(run, o);
  auto* isolate = app.add_subcommand("isolate", "isolation plan");
  isolate->add_option("plan", path)->required()->check(CLI::ExistingFile);
  add_overrides(isolate, o);
  auto* theory = app.add_subcommand("theory", "exact theory suite");
  theory->add_option("plan", path)->required()->check(CLI::ExistingFile);
  add_overrides(theory, o);
  auto* table = app.add_subcommand("table", "print tables from a result directory");
  table->add_option("dir", path)->required()->check(CLI::ExistingDirectory);
  auto* hash = app.add_subcommand("hash", "print a plan's hash");
  hash->add_option("plan", path)->required()->check(CLI::ExistingFile);
  bool canonical = false;
  hash->add_flag("--canonical", canonical, "print the canonical text too");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto plan = prepare(path, o);
      const auto rs = compete::run_plan(plan);
      compete::render_table(std::cout, rs);
      std::cout << fmt::format("\n{} cells in {:.1f}s -> {}\n", rs.cells.size(), rs.wall_seconds, plan.output.string());
    } else if (isolate->parsed()) {
      const auto plan = prepare(path, o);
      const auto res = compete::run_isolation(plan);
      for (const auto& s : res.series) {
        const auto last = s.reputation.size() - 1;
        std::cout << fmt::format("{:<12} {:<24} final reputation {:.4f} ± {:.4f}\n", s.instance, s.algorithm,
                                 s.reputation.value(last), s.reputation.ci95(last));
      }
      for (const auto& r : res.relative) {
        const auto last = r.trajectory.size() - 1;
        std::cout << fmt::format("{:<12} {} vs {}: relative reputation {:.4f} ± {:.4f}\n", r.instance, r.a, r.b,
                                 r.trajectory.value(last), r.trajectory.ci95(last));
      }
    } else if (theory->parsed()) {
      const auto plan = prepare(path, o);
      const auto report = compete::run_theory_plan(plan);
      for (const auto& c : report.checks) {
        std::cout << fmt::format("[{}] {:<32} {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
      }
      if (!report.all_passed()) return 3;
    } else if (table->parsed()) {
      compete::render_table(std::cout, compete::load_results(path));
    } else if (hash->parsed()) {
      const auto plan = compete::load_plan(path);
      if (canonical) std::cout << compete::canonical_plan(plan);
      std::cout << compete::plan_hash(plan) << '\n';
    }
  } catch (const compete::GuardError& e) {
    std::cerr << "guard: " << e.what() << '\n';
    return 2;
  } catch (const compete::ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
