#include "compete/engine.hpp"

#include <ostream>

#include <fmt/format.h>

namespace compete {

Variant parse_variant(std::string_view name) {
  if (name == "standard") return Variant::Standard;
  if (name == "data_advantage_only" || name == "data") return Variant::DataAdvantageOnly;
  if (name == "reputation_advantage_only" || name == "reputation") return Variant::ReputationAdvantageOnly;
  throw ConfigError(fmt::format("unknown variant '{}'", name));
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Standard:
      return "standard";
    case Variant::DataAdvantageOnly:
      return "data_advantage_only";
    case Variant::ReputationAdvantageOnly:
      return "reputation_advantage_only";
  }
  return "unknown";
}

void GameConfig::validate() const {
  if (T < 1) throw ConfigError("game horizon T must be at least 1");
  if (M < 1) throw ConfigError("window size M must be at least 1");
  if (firms.empty()) throw ConfigError("a game needs at least one firm");
  if (warm_rows && *warm_rows < X + T0) {
    throw ConfigError(fmt::format("warm_rows {} is shorter than X + T0 = {}", *warm_rows, X + T0));
  }
  response.validate();
  for (const auto& k : firms) k.validate();
}

std::size_t GameTrace::served_before(std::size_t firm, std::size_t t) const {
  std::size_t n = 0;
  for (std::size_t s = 0; s + 1 < t && s < chooser.size(); ++s) n += chooser[s] == firm ? 1 : 0;
  return n;
}

bool operator==(const GameTrace& a, const GameTrace& b) {
  if (a.chooser != b.chooser || a.arm != b.arm || a.reward != b.reward) return false;
  if (a.reputation.rows() != b.reputation.rows() || a.reputation.cols() != b.reputation.cols()) return false;
  if (a.reputation != b.reputation) return false;
  if (a.warm.size() != b.warm.size()) return false;
  for (std::size_t i = 0; i < a.warm.size(); ++i) {
    if (a.warm[i].arms != b.warm[i].arms || a.warm[i].rewards != b.warm[i].rewards ||
        a.warm[i].recorded != b.warm[i].recorded) {
      return false;
    }
  }
  return true;
}

WarmStartResult warm_start(AlgorithmState state, const RealizationTable& table, std::size_t length,
                           ReputationWindow window, AlgorithmStreams& streams, std::size_t hide_from_window) {
  if (static_cast<Index>(length) > table.rows()) {
    throw ConfigError(fmt::format("warm start of {} rounds needs more than the table's {} rows", length, table.rows()));
  }
  if (static_cast<Index>(state.arms()) != table.arms()) throw ConfigError("algorithm and table disagree on K");
  WarmLog log;
  log.arms.reserve(length);
  log.rewards.reserve(length);
  log.recorded.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    const ArmChoice choice = next_arm(state, streams);
    const int reward = table(static_cast<Index>(t), static_cast<Index>(choice.arm));
    state.record(choice.arm, reward, choice.recording);
    if (t >= hide_from_window) window.push(reward);
    log.arms.push_back(static_cast<std::uint32_t>(choice.arm));
    log.rewards.push_back(static_cast<std::uint8_t>(reward));
    log.recorded.push_back(choice.recording == Recording::Recorded ? 1 : 0);
  }
  return {std::move(state), std::move(window), std::move(log)};
}

namespace {

GameTrace play(const GameConfig& cfg, const MeanRewardVector& mrv, const RealizationTable& table,
               const RngStream& rng) {
  cfg.validate();
  const std::size_t n = cfg.firms.size();
  if (table.arms() != mrv.arms()) throw ConfigError("realization table and MRV disagree on K");
  if (table.rows() < static_cast<Index>(cfg.required_rows())) {
    throw ConfigError(fmt::format("realization table has {} rows, game needs {}", table.rows(), cfg.required_rows()));
  }
  const auto arms = static_cast<std::size_t>(mrv.arms());

  std::vector<AlgorithmState> states;
  std::vector<ReputationWindow> windows;
  std::vector<AlgorithmStreams> streams;
  GameTrace trace;
  states.reserve(n);
  windows.reserve(n);
  streams.reserve(n);
  for (std::size_t i = 0; i < n; ++i) streams.emplace_back(rng.split(1 + i));

  for (std::size_t i = 0; i < n; ++i) {
    const bool incumbent = i == 0 && cfg.X > 0;
    const std::size_t length = cfg.T0 + (incumbent ? cfg.X : 0);
    const std::size_t hidden = incumbent && cfg.variant == Variant::DataAdvantageOnly ? cfg.X : 0;
    auto warm = warm_start(AlgorithmState(cfg.firms[i], arms), table, length, ReputationWindow(cfg.M), streams[i],
                           hidden);
    if (incumbent && cfg.variant == Variant::ReputationAdvantageOnly) {
      AlgorithmState fresh(cfg.firms[i], arms);
      for (std::size_t t = cfg.X; t < length; ++t) {
        fresh.record(warm.log.arms[t], warm.log.rewards[t],
                     warm.log.recorded[t] != 0 ? Recording::Recorded : Recording::Unrecorded);
      }
      warm.state = std::move(fresh);
    }
    states.push_back(std::move(warm.state));
    windows.push_back(std::move(warm.window));
    trace.warm.push_back(std::move(warm.log));
  }

  RngStream choice_rng = rng.split(0);
  const std::size_t offset = cfg.table_warm_rows();
  trace.chooser.resize(cfg.T);
  trace.arm.resize(cfg.T);
  trace.reward.resize(cfg.T);
  trace.reputation.resize(static_cast<Index>(cfg.T), static_cast<Index>(n));
  std::vector<double> scores(n);
  for (std::size_t t = 0; t < cfg.T; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = windows[i].score();
      trace.reputation(static_cast<Index>(t), static_cast<Index>(i)) = scores[i];
    }
    const std::size_t firm = choose_firm(cfg.response, scores, choice_rng);
    const ArmChoice choice = next_arm(states[firm], streams[firm]);
    const int reward = table(static_cast<Index>(offset + t), static_cast<Index>(choice.arm));
    states[firm].record(choice.arm, reward, choice.recording);
    windows[firm].push(reward);
    trace.chooser[t] = static_cast<std::uint32_t>(firm);
    trace.arm[t] = static_cast<std::uint32_t>(choice.arm);
    trace.reward[t] = static_cast<std::uint8_t>(reward);
  }
  return trace;
}

}  // namespace

GameTrace run_game(const GameConfig& cfg, const MeanRewardVector& mrv, const RealizationTable& table,
                   const RngStream& rng) {
  if (cfg.firms.size() != 2) throw ConfigError("run_game is a duopoly; use run_n_firms for more firms");
  return play(cfg, mrv, table, rng);
}

GameTrace run_n_firms(const GameConfig& cfg, const MeanRewardVector& mrv, const RealizationTable& table,
                      const RngStream& rng) {
  if (cfg.firms.size() < 2) throw ConfigError("run_n_firms needs at least two firms");
  if (cfg.firms.size() > 2 && cfg.response.tag == ResponseTag::SoftMax) {
    throw ConfigError("n-firm games use a HardMax-type response");
  }
  return play(cfg, mrv, table, rng);
}

GameTrace run_alone(const GameConfig& cfg, const MeanRewardVector& mrv, const RealizationTable& table,
                    const RngStream& rng) {
  if (cfg.firms.size() != 1) throw ConfigError("run_alone takes exactly one firm");
  return play(cfg, mrv, table, rng);
}

void write_trace_csv(std::ostream& out, const GameTrace& trace) {
  out << "round,firm,arm,reward";
  for (std::size_t i = 0; i < trace.firms(); ++i) out << ",rep_" << i;
  out << '\n';
  for (std::size_t t = 0; t < trace.rounds(); ++t) {
    out << (t + 1) << ',' << trace.chooser[t] << ',' << trace.arm[t] << ',' << int{trace.reward[t]};
    for (std::size_t i = 0; i < trace.firms(); ++i) {
      out << ',' << fmt::format("{}", trace.reputation(static_cast<Index>(t), static_cast<Index>(i)));
    }
    out << '\n';
  }
}

}  // namespace compete
