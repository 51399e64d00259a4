#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "compete/algorithms.hpp"
#include "compete/choice.hpp"
#include "compete/engine.hpp"
#include "compete/instances.hpp"
#include "compete/metrics.hpp"

namespace compete {

enum class Experiment { Duopoly, NFirms, Isolation, Theory };

Experiment parse_experiment(std::string_view name);
std::string_view experiment_name(Experiment e);

/// Settings for the exact theory suite. Defaults form the small two-arm prior
/// used throughout the tests.
struct TheoryConfig {
  std::vector<double> support{0.3, 0.8};
  /// One weight vector per arm over `support`.
  std::vector<std::vector<double>> weights{{0.5, 0.5}, {0.6, 0.4}};
  std::size_t horizon = 20;
  std::size_t monotone_horizon = 10;
  std::size_t audit_horizon = 8;
  double perturb_scale = 1e-3;
  double epsilon = 0.1;      // epsilon-greedy exploration rate
  double mix_p = 0.5;        // greedy-modification mixing parameter
  int switch_step = 3;       // n0 of greedy_mod(ts) in the HardMax check
  double hmr_epsilon = 0.1;  // choice noise for the greedy-modification check
  // Synthetic curves bir1 = c1 / sqrt(n), bir2 = c2 / cbrt(n).
  double synthetic_c1 = 0.01;
  double synthetic_c2 = 0.3;
  double synthetic_hmr_epsilon = 0.5;
  std::size_t synthetic_horizon = 400;
  double softmax_base = 9.0;
  double softmax_delta0 = 1.0;
};

/// A parsed experiment plan. Algorithm names in `pairs`, `firm_lists` and
/// `solo` refer to `algorithms` (which starts out with dg, deg, ts and sg).
struct ExperimentPlan {
  std::string name = "experiment";
  Experiment experiment = Experiment::Duopoly;
  std::vector<InstanceKind> instances{InstanceKind{}};
  Index arms = 10;
  std::size_t N = 1000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> T{2000};
  std::vector<std::size_t> T0{20};
  std::vector<std::size_t> X{0};
  std::size_t M = 100;
  ResponseFunction response;
  std::vector<Variant> variants{Variant::Standard};
  std::map<std::string, AlgorithmKind> algorithms;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::vector<std::string>> firm_lists;
  std::vector<std::string> solo;
  std::vector<std::pair<std::string, std::string>> relative;
  std::size_t smooth = 1;
  std::size_t workers = 1;
  std::filesystem::path output = "out";
  TheoryConfig theory;

  ExperimentPlan();
  const AlgorithmKind& algorithm(const std::string& name) const;
  void validate() const;
};

ExperimentPlan parse_plan(std::string_view text);
ExperimentPlan load_plan(const std::filesystem::path& path);

/// Canonical text of every field that affects results (not workers/output).
std::string canonical_plan(const ExperimentPlan& plan);
/// 16 hex digits of FNV-1a over canonical_plan().
std::string plan_hash(const ExperimentPlan& plan);

/// Worker count after the COMPETE_WORKERS override.
std::size_t effective_workers(const ExperimentPlan& plan);

/// One game configuration run over all N MRVs.
struct Cell {
  std::string key;
  const InstanceKind* instance = nullptr;
  std::vector<std::string> firms;  // algorithm names, firm 0 first
  GameConfig game;
};

std::vector<Cell> expand_cells(const ExperimentPlan& plan);

struct CellResult {
  std::string key;
  std::string instance;
  std::vector<std::string> firms;
  GameConfig game;
  std::string response;
  std::vector<AggregateStat> share;  // per firm
  AggregateStat eeog;
  AggregateStat regret;
  AggregateStat regret_pregame;
  /// N x firms final-round reputation scores.
  Eigen::MatrixXd final_reputation;
  std::vector<double> share_samples0;  // firm 0 share per MRV
};

struct ResultSet {
  std::string plan_hash;
  std::vector<CellResult> cells;
  double wall_seconds = 0.0;

  const CellResult& find(std::string_view key) const;
};

/// Draws N MRVs per instance with one realization table each, plays every
/// cell on all of them and aggregates. Writes CSVs if `write` is set.
ResultSet run_plan(const ExperimentPlan& plan, bool write = true);

struct IsolationResult {
  std::string plan_hash;
  struct Series {
    std::string instance;
    std::string algorithm;
    Trajectory reputation;
    Trajectory reward;
    Eigen::VectorXd final_reputation;
  };
  std::vector<Series> series;
  struct Relative {
    std::string instance;
    std::string a;
    std::string b;
    Trajectory trajectory;
  };
  std::vector<Relative> relative;

  const Series& find(std::string_view instance, std::string_view algorithm) const;
  const Relative& find_relative(std::string_view instance, std::string_view a, std::string_view b) const;
};

IsolationResult run_isolation(const ExperimentPlan& plan, bool write = true);

struct TheoryCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TheoryReport {
  std::string plan_hash;
  std::vector<TheoryCheck> checks;

  bool all_passed() const;
  const TheoryCheck& find(std::string_view name) const;
};

/// Runs every exact checker on `cfg`. With `swap_hardmax` the greedy-vs-deviator check
/// puts the deviating curve first, which must make it fail.
TheoryReport run_theory_suite(const TheoryConfig& cfg, bool swap_hardmax = false);
/// Plan form: runs the suite and writes curves, dynamics and the report.
TheoryReport run_theory_plan(const ExperimentPlan& plan, bool write = true);

/// Reads a result directory back; rejects rows whose plan hash disagrees.
ResultSet load_results(const std::filesystem::path& dir);

/// Text tables of market share and EEOG per cell group.
void render_table(std::ostream& out, const ResultSet& results);

}  // namespace compete
