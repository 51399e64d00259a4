#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "compete/algorithms.hpp"
#include "compete/choice.hpp"
#include "compete/core.hpp"

namespace compete {

enum class Variant {
  Standard,
  /// The incumbent's monopoly-period rewards never enter its reputation window.
  DataAdvantageOnly,
  /// The incumbent forgets its monopoly-period data when competition starts.
  ReputationAdvantageOnly,
};

Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant v);

/// One competition game. Firm 0 is the incumbent when X > 0.
struct GameConfig {
  std::size_t T = 2000;
  std::size_t T0 = 20;
  std::size_t X = 0;
  std::size_t M = 100;
  /// Rows reserved for warm starts in the table (the experiment's longest
  /// X + T0). Defaults to this game's X + T0.
  std::optional<std::size_t> warm_rows;
  ResponseFunction response;
  std::vector<AlgorithmKind> firms;
  Variant variant = Variant::Standard;

  std::size_t table_warm_rows() const { return warm_rows.value_or(X + T0); }
  std::size_t required_rows() const { return table_warm_rows() + T; }
  void validate() const;
};

/// Arms pulled and rewards seen by one firm before the game starts.
struct WarmLog {
  std::vector<std::uint32_t> arms;
  std::vector<std::uint8_t> rewards;
  std::vector<std::uint8_t> recorded;
};

/// Per-round record of one game; rounds are 1-based in the accessors' docs
/// and 0-based in storage.
struct GameTrace {
  std::vector<std::uint32_t> chooser;
  std::vector<std::uint32_t> arm;
  std::vector<std::uint8_t> reward;
  /// T x n matrix of the scores agents saw before choosing.
  Eigen::MatrixXd reputation;
  std::vector<WarmLog> warm;

  std::size_t rounds() const noexcept { return chooser.size(); }
  std::size_t firms() const noexcept { return static_cast<std::size_t>(reputation.cols()); }
  /// Number of rounds before round t (1-based) in which `firm` was chosen.
  std::size_t served_before(std::size_t firm, std::size_t t) const;

  friend bool operator==(const GameTrace& a, const GameTrace& b);
};

struct WarmStartResult {
  AlgorithmState state;
  ReputationWindow window;
  WarmLog log;
};

/// Replays `length` warm rounds from table rows 0..length-1: the firm picks an
/// arm, reads W(t, a), records it and pushes it into its window. The first
/// `hide_from_window` rewards are kept out of the window.
WarmStartResult warm_start(AlgorithmState state, const RealizationTable& table, std::size_t length,
                           ReputationWindow window, AlgorithmStreams& streams, std::size_t hide_from_window = 0);

/// Duopoly game.
GameTrace run_game(const GameConfig& cfg, const MeanRewardVector& mrv, const RealizationTable& table,
                   const RngStream& rng);

/// Same protocol with n >= 2 firms; requires a HardMax or HardMax&Random response.
GameTrace run_n_firms(const GameConfig& cfg, const MeanRewardVector& mrv, const RealizationTable& table,
                      const RngStream& rng);

/// A single firm serving every agent (performance in isolation).
GameTrace run_alone(const GameConfig& cfg, const MeanRewardVector& mrv, const RealizationTable& table,
                    const RngStream& rng);

/// CSV rows "round,firm,arm,reward,rep_0,rep_1[,rep_i...]".
void write_trace_csv(std::ostream& out, const GameTrace& trace);

}  // namespace compete
