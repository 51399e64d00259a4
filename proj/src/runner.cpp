#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "compete/harness.hpp"
#include "json.hpp"

namespace compete {

namespace {

constexpr std::string_view kVersion = "1.0.0";

/// Runs body(i) for i in [0, n) on `workers` threads; each index writes only
/// its own slot, so results do not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

/// aggregate() that tolerates a single sample (zero spread).
AggregateStat summarize(const std::vector<double>& v) {
  if (v.size() >= 2) return aggregate(v);
  AggregateStat s;
  s.n = v.size();
  if (!v.empty()) s.mean = s.median = v.front();
  return s;
}

struct InstanceData {
  std::vector<MeanRewardVector> mrvs;
  std::vector<RealizationTable> tables;
};

std::string mrv_key(const InstanceKind& inst, Index arms) { return fmt::format("{}|K={}", inst.descriptor(), arms); }

InstanceData draw_instance(const ExperimentPlan& plan, const InstanceKind& inst, std::size_t rows, std::size_t workers) {
  InstanceData d;
  const std::uint64_t key = hash_name(mrv_key(inst, plan.arms));
  std::vector<std::optional<MeanRewardVector>> mrvs(plan.N);
  std::vector<std::optional<RealizationTable>> tables(plan.N);
  parallel_for(plan.N, workers, [&](std::size_t i) {
    RngStream mrv_rng(plan.seed, stream_id({key, i, hash_name("mrv")}));
    mrvs[i] = sample_instance(inst, plan.arms, mrv_rng);
    tables[i] = generate_realization_table(*mrvs[i], static_cast<Index>(rows),
                                           RngStream(plan.seed, stream_id({key, i, hash_name("table")})));
  });
  for (std::size_t i = 0; i < plan.N; ++i) {
    d.mrvs.push_back(std::move(*mrvs[i]));
    d.tables.push_back(std::move(*tables[i]));
  }
  return d;
}

RngStream game_stream(const ExperimentPlan& plan, const std::string& cell_key, std::size_t mrv) {
  return RngStream(plan.seed, stream_id({hash_name(cell_key), mrv, hash_name("game")}));
}

GameTrace play_cell(const Cell& c, const MeanRewardVector& mrv, const RealizationTable& table, const RngStream& rng) {
  if (c.game.firms.size() == 1) return run_alone(c.game, mrv, table, rng);
  if (c.game.firms.size() == 2) return run_game(c.game, mrv, table, rng);
  return run_n_firms(c.game, mrv, table, rng);
}

struct RunSummary {
  std::vector<double> share;
  double eeog = 0.0;
  double regret = 0.0;
  double regret_pregame = 0.0;
  std::vector<double> final_rep;
};

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
  return out;
}

void write_trajectory(const std::filesystem::path& p, const std::string& hash, const Trajectory& t) {
  auto out = open_out(p);
  out << "plan_hash,round,value,ci95\n";
  for (Index i = 0; i < t.size(); ++i) out << fmt::format("{},{},{},{}\n", hash, i + 1, t.value(i), t.ci95(i));
}

void write_manifest(const ExperimentPlan& plan, const std::string& hash, double seconds,
                    const std::vector<std::string>& files) {
  nlohmann::ordered_json j;
  j["plan_hash"] = hash;
  j["name"] = plan.name;
  j["experiment"] = std::string(experiment_name(plan.experiment));
  j["seed"] = plan.seed;
  j["N"] = plan.N;
  j["workers"] = effective_workers(plan);
  j["version"] = std::string(kVersion);
  j["wall_seconds"] = seconds;
  j["files"] = files;
  auto out = open_out(plan.output / "manifest.json");
  out << j.dump(2) << '\n';
}

std::string cell_columns(const CellResult& c) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", csv_field(c.key), csv_field(c.instance),
                     csv_field(fmt::format("{}", fmt::join(c.firms, "-"))), c.game.T, c.game.T0, c.game.X, c.game.M,
                     variant_name(c.game.variant), csv_field(c.response));
}

constexpr std::string_view kCellHeader = "plan_hash,cell,instance,pair,T,T0,X,M,variant,response";

void write_results(const ExperimentPlan& plan, const ResultSet& rs) {
  std::filesystem::create_directories(plan.output);
  const std::string& h = rs.plan_hash;
  {
    auto out = open_out(plan.output / "market_share.csv");
    out << kCellHeader << ",firm,algorithm,mean,ci95,var,median,n\n";
    for (const auto& c : rs.cells) {
      for (std::size_t f = 0; f < c.share.size(); ++f) {
        const auto& s = c.share[f];
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", h, cell_columns(c), f, csv_field(c.firms[f]), s.mean,
                           s.ci95_halfwidth, s.variance, s.median, s.n);
      }
    }
  }
  {
    auto out = open_out(plan.output / "eeog.csv");
    out << kCellHeader << ",mean,median,ci95,var,n\n";
    for (const auto& c : rs.cells) {
      const auto& s = c.eeog;
      out << fmt::format("{},{},{},{},{},{},{}\n", h, cell_columns(c), s.mean, s.median, s.ci95_halfwidth, s.variance, s.n);
    }
  }
  {
    auto out = open_out(plan.output / "welfare.csv");
    out << kCellHeader << ",pregame,mean,ci95,var,median,n\n";
    for (const auto& c : rs.cells) {
      for (int pre = 0; pre <= 1; ++pre) {
        const auto& s = pre ? c.regret_pregame : c.regret;
        out << fmt::format("{},{},{},{},{},{},{},{}\n", h, cell_columns(c), pre, s.mean, s.ci95_halfwidth, s.variance,
                           s.median, s.n);
      }
    }
  }
  {
    auto out = open_out(plan.output / "reputation_samples.csv");
    out << "plan_hash,cell,mrv_index,round,firm,score\n";
    for (const auto& c : rs.cells) {
      for (Index i = 0; i < c.final_reputation.rows(); ++i) {
        for (Index f = 0; f < c.final_reputation.cols(); ++f) {
          out << fmt::format("{},{},{},{},{},{}\n", h, csv_field(c.key), i, c.game.T, f, c.final_reputation(i, f));
        }
      }
    }
  }
  write_manifest(plan, h, rs.wall_seconds, {"market_share.csv", "eeog.csv", "welfare.csv", "reputation_samples.csv"});
}

std::size_t rows_for(const std::vector<Cell>& cells, const InstanceKind* inst) {
  std::size_t rows = 1;
  for (const auto& c : cells) {
    if (c.instance == inst) rows = std::max(rows, c.game.required_rows());
  }
  return rows;
}

}  // namespace

const CellResult& ResultSet::find(std::string_view key) const {
  for (const auto& c : cells) {
    if (c.key == key) return c;
  }
  throw std::out_of_range(fmt::format("no cell '{}'", key));
}

ResultSet run_plan(const ExperimentPlan& plan, bool write) {
  plan.validate();
  if (plan.experiment != Experiment::Duopoly && plan.experiment != Experiment::NFirms) {
    throw ConfigError("run_plan takes duopoly or nfirms plans");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t workers = effective_workers(plan);
  const auto cells = expand_cells(plan);
  ResultSet rs;
  rs.plan_hash = plan_hash(plan);
  for (const auto& inst : plan.instances) {
    const InstanceData data = draw_instance(plan, inst, rows_for(cells, &inst), workers);
    for (const auto& c : cells) {
      if (c.instance != &inst) continue;
      std::vector<RunSummary> runs(plan.N);
      parallel_for(plan.N, workers, [&](std::size_t i) {
        const GameTrace tr = play_cell(c, data.mrvs[i], data.tables[i], game_stream(plan, c.key, i));
        RunSummary& s = runs[i];
        for (std::size_t f = 0; f < tr.firms(); ++f) s.share.push_back(market_share(tr, f));
        s.eeog = static_cast<double>(eeog(tr));
        const Trajectory reg = market_regret(tr, data.mrvs[i], false);
        s.regret = reg.value(reg.size() - 1);
        s.regret_pregame = s.regret + pregame_regret(tr, data.mrvs[i]);
        for (std::size_t f = 0; f < tr.firms(); ++f) {
          s.final_rep.push_back(tr.reputation(static_cast<Index>(tr.rounds() - 1), static_cast<Index>(f)));
        }
      });
      CellResult r;
      r.key = c.key;
      r.instance = inst.name();
      r.firms = c.firms;
      r.game = c.game;
      r.response = c.game.response.name();
      const std::size_t n = c.firms.size();
      std::vector<double> col(plan.N);
      for (std::size_t f = 0; f < n; ++f) {
        for (std::size_t i = 0; i < plan.N; ++i) col[i] = runs[i].share[f];
        r.share.push_back(summarize(col));
        if (f == 0) r.share_samples0 = col;
      }
      for (std::size_t i = 0; i < plan.N; ++i) col[i] = runs[i].eeog;
      r.eeog = summarize(col);
      for (std::size_t i = 0; i < plan.N; ++i) col[i] = runs[i].regret;
      r.regret = summarize(col);
      for (std::size_t i = 0; i < plan.N; ++i) col[i] = runs[i].regret_pregame;
      r.regret_pregame = summarize(col);
      r.final_reputation.resize(static_cast<Index>(plan.N), static_cast<Index>(n));
      for (std::size_t i = 0; i < plan.N; ++i) {
        for (std::size_t f = 0; f < n; ++f) r.final_reputation(static_cast<Index>(i), static_cast<Index>(f)) = runs[i].final_rep[f];
      }
      rs.cells.push_back(std::move(r));
    }
  }
  rs.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (write) write_results(plan, rs);
  return rs;
}

const IsolationResult::Series& IsolationResult::find(std::string_view instance, std::string_view algorithm) const {
  for (const auto& s : series) {
    if (s.instance == instance && s.algorithm == algorithm) return s;
  }
  throw std::out_of_range(fmt::format("no isolation series {}/{}", instance, algorithm));
}

const IsolationResult::Relative& IsolationResult::find_relative(std::string_view instance, std::string_view a,
                                                                std::string_view b) const {
  for (const auto& r : relative) {
    if (r.instance == instance && r.a == a && r.b == b) return r;
  }
  throw std::out_of_range(fmt::format("no relative trajectory {}/{} vs {}", instance, a, b));
}

IsolationResult run_isolation(const ExperimentPlan& plan, bool write) {
  plan.validate();
  if (plan.experiment != Experiment::Isolation) throw ConfigError("run_isolation takes isolation plans");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t workers = effective_workers(plan);
  const auto cells = expand_cells(plan);
  IsolationResult res;
  res.plan_hash = plan_hash(plan);
  const std::string& h = res.plan_hash;
  std::vector<std::string> files;
  std::ofstream samples;
  if (write) {
    std::filesystem::create_directories(plan.output);
    samples = open_out(plan.output / "reputation_samples.csv");
    samples << "plan_hash,cell,mrv_index,round,firm,score\n";
  }
  auto emit = [&](const std::string& stem, const Trajectory& t) {
    if (!write) return;
    write_trajectory(plan.output / (stem + ".csv"), h, t);
    files.push_back(stem + ".csv");
    if (plan.smooth > 1) {
      write_trajectory(plan.output / (stem + "_smoothed.csv"), h, moving_average(t, static_cast<Index>(plan.smooth)));
      files.push_back(stem + "_smoothed.csv");
    }
  };
  for (const auto& inst : plan.instances) {
    const InstanceData data = draw_instance(plan, inst, rows_for(cells, &inst), workers);
    // Relative reputation needs equal horizons, so key series by (T, T0).
    std::map<std::string, Eigen::MatrixXd> rep_by_cell;
    for (const auto& c : cells) {
      if (c.instance != &inst) continue;
      const auto T = static_cast<Index>(c.game.T);
      Eigen::MatrixXd rep(T, static_cast<Index>(plan.N));
      Eigen::MatrixXd reward(T, static_cast<Index>(plan.N));
      parallel_for(plan.N, workers, [&](std::size_t i) {
        const GameTrace tr = play_cell(c, data.mrvs[i], data.tables[i], game_stream(plan, c.key, i));
        rep.col(static_cast<Index>(i)) = tr.reputation.col(0);
        for (Index t = 0; t < T; ++t) reward(t, static_cast<Index>(i)) = data.mrvs[i][tr.arm[static_cast<std::size_t>(t)]];
      });
      IsolationResult::Series s;
      s.instance = inst.name();
      s.algorithm = c.firms[0];
      s.reputation = trajectory_from_samples(rep);
      s.reward = trajectory_from_samples(reward);
      s.final_reputation = rep.row(T - 1).transpose();
      const std::string suffix = plan.T.size() > 1 || plan.T0.size() > 1
                                     ? fmt::format("_T{}_T0{}", c.game.T, c.game.T0)
                                     : std::string();
      emit(fmt::format("trajectory_{}_{}{}_reputation", s.instance, s.algorithm, suffix), s.reputation);
      emit(fmt::format("trajectory_{}_{}{}_reward", s.instance, s.algorithm, suffix), s.reward);
      if (write) {
        for (std::size_t i = 0; i < plan.N; ++i) {
          samples << fmt::format("{},{},{},{},0,{}\n", h, csv_field(c.key), i, c.game.T,
                                 s.final_reputation(static_cast<Index>(i)));
        }
      }
      rep_by_cell[s.algorithm + suffix] = std::move(rep);
      res.series.push_back(std::move(s));
    }
    for (const auto& [a, b] : plan.relative) {
      for (std::size_t T : plan.T) {
        for (std::size_t T0 : plan.T0) {
          const std::string suffix = plan.T.size() > 1 || plan.T0.size() > 1 ? fmt::format("_T{}_T0{}", T, T0) : std::string();
          IsolationResult::Relative r;
          r.instance = inst.name();
          r.a = a;
          r.b = b;
          r.trajectory = relative_reputation(rep_by_cell.at(a + suffix), rep_by_cell.at(b + suffix));
          emit(fmt::format("trajectory_{}_{}_vs_{}{}_relative", r.instance, a, b, suffix), r.trajectory);
          res.relative.push_back(std::move(r));
        }
      }
    }
  }
  if (write) {
    samples.close();
    files.push_back("reputation_samples.csv");
    write_manifest(plan, h, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), files);
  }
  return res;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ConfigError(fmt::format("result file lacks column '{}'", name));
  }
};

CsvTable read_csv(const std::filesystem::path& p, const std::string& hash) {
  std::ifstream in(p);
  if (!in) throw ConfigError(fmt::format("cannot read {}", p.string()));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(fmt::format("{} is empty", p.string()));
  t.header = split_csv(line);
  const std::size_t hc = t.col("plan_hash");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_csv(line);
    if (row.size() != t.header.size()) throw ConfigError(fmt::format("malformed row in {}", p.string()));
    if (row[hc] != hash) {
      throw ConfigError(fmt::format("{} mixes plan hashes ({} and {})", p.filename().string(), hash, row[hc]));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

ResultSet load_results(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw ConfigError(fmt::format("no manifest.json in {}", dir.string()));
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("bad manifest: {}", e.what()));
  }
  ResultSet rs;
  rs.plan_hash = manifest.at("plan_hash").get<std::string>();
  rs.wall_seconds = manifest.value("wall_seconds", 0.0);
  const CsvTable shares = read_csv(dir / "market_share.csv", rs.plan_hash);
  const CsvTable eeogs = read_csv(dir / "eeog.csv", rs.plan_hash);
  for (const auto& f : {"welfare.csv", "reputation_samples.csv"}) {
    if (std::filesystem::exists(dir / f)) read_csv(dir / f, rs.plan_hash);
  }
  std::map<std::string, std::size_t> index;
  auto to_size = [](const std::string& s) { return static_cast<std::size_t>(std::stoull(s)); };
  for (const auto& row : shares.rows) {
    const std::string& key = row[shares.col("cell")];
    auto [it, fresh] = index.try_emplace(key, rs.cells.size());
    if (fresh) {
      CellResult c;
      c.key = key;
      c.instance = row[shares.col("instance")];
      c.game.T = to_size(row[shares.col("T")]);
      c.game.T0 = to_size(row[shares.col("T0")]);
      c.game.X = to_size(row[shares.col("X")]);
      c.game.M = to_size(row[shares.col("M")]);
      c.game.variant = parse_variant(row[shares.col("variant")]);
      c.response = row[shares.col("response")];
      rs.cells.push_back(std::move(c));
    }
    CellResult& c = rs.cells[it->second];
    AggregateStat s;
    s.mean = std::stod(row[shares.col("mean")]);
    s.ci95_halfwidth = std::stod(row[shares.col("ci95")]);
    s.variance = std::stod(row[shares.col("var")]);
    s.median = std::stod(row[shares.col("median")]);
    s.n = to_size(row[shares.col("n")]);
    c.firms.push_back(row[shares.col("algorithm")]);
    c.share.push_back(s);
  }
  for (const auto& row : eeogs.rows) {
    auto it = index.find(row[eeogs.col("cell")]);
    if (it == index.end()) throw ConfigError("eeog.csv names a cell missing from market_share.csv");
    AggregateStat& s = rs.cells[it->second].eeog;
    s.mean = std::stod(row[eeogs.col("mean")]);
    s.median = std::stod(row[eeogs.col("median")]);
    s.ci95_halfwidth = std::stod(row[eeogs.col("ci95")]);
    s.variance = std::stod(row[eeogs.col("var")]);
    s.n = to_size(row[eeogs.col("n")]);
  }
  return rs;
}

void render_table(std::ostream& out, const ResultSet& rs) {
  // Group duopoly cells by everything except the pair.
  std::map<std::string, std::vector<const CellResult*>> groups;
  std::vector<const CellResult*> others;
  for (const auto& c : rs.cells) {
    if (c.firms.size() != 2) {
      others.push_back(&c);
      continue;
    }
    groups[fmt::format("{}  T={}  T0={}  X={}  M={}  {}  {}", c.instance, c.game.T, c.game.T0, c.game.X, c.game.M,
                       variant_name(c.game.variant), c.response)]
        .push_back(&c);
  }
  out << "plan " << rs.plan_hash << '\n';
  for (const auto& [title, cells] : groups) {
    // With an incumbent the entrant (firm 1) is the row and its share is shown.
    const bool entrant_rows = cells.front()->game.X > 0;
    const std::size_t row_firm = entrant_rows ? 1 : 0;
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    for (const auto* c : cells) {
      const auto& r = c->firms[row_firm];
      const auto& k = c->firms[1 - row_firm];
      if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows.push_back(r);
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
    auto lookup = [&](const std::string& r, const std::string& k) -> const CellResult* {
      for (const auto* c : cells) {
        if (c->firms[row_firm] == r && c->firms[1 - row_firm] == k) return c;
      }
      return nullptr;
    };
    const std::string share_title = entrant_rows ? "  entrant (row) share vs incumbent (column)" : "  market share of row firm";
    for (int table = 0; table < 2; ++table) {
      out << '\n' << title << (table == 0 ? share_title : "  EEOG mean (median)") << '\n';
      out << fmt::format("{:>14}", "");
      for (const auto& k : cols) out << fmt::format(" {:>18}", k);
      out << '\n';
      for (const auto& r : rows) {
        out << fmt::format("{:>14}", r);
        for (const auto& k : cols) {
          const CellResult* c = lookup(r, k);
          std::string v = "-";
          if (c && table == 0) {
            v = fmt::format("{:.3f} ± {:.3f}", c->share[row_firm].mean, c->share[row_firm].ci95_halfwidth);
          }
          if (c && table == 1) v = fmt::format("{:.1f} ({:.0f})", c->eeog.mean, c->eeog.median);
          out << fmt::format(" {:>18}", v);
        }
        out << '\n';
      }
    }
  }
  if (!others.empty()) {
    out << '\n' << fmt::format("{:<40} {:>8} {:>10} {:>16}", "firms", "T", "EEOG", "share(firm 0)") << '\n';
    for (const auto* c : others) {
      out << fmt::format("{:<40} {:>8} {:>10.1f} {:>16.3f}", fmt::format("{} {}", c->instance, fmt::join(c->firms, "-")),
                         c->game.T, c->eeog.mean, c->share[0].mean)
          << '\n';
    }
  }
}

}  // namespace compete
