#include "compete/algorithms.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace compete {

namespace {

constexpr std::uint64_t kExploreCoin = 1;
constexpr std::uint64_t kExploreArm = 2;
constexpr std::uint64_t kSamples = 3;
constexpr std::uint64_t kMixCoin = 4;
constexpr std::uint64_t kTies = 5;

template <typename Score>
std::size_t argmax(std::size_t n, Score&& score, TieBreak tie_break, RngStream& ties) {
  std::size_t best = 0;
  double best_value = score(0);
  std::size_t tied = 1;
  for (std::size_t a = 1; a < n; ++a) {
    const double v = score(a);
    if (v > best_value) {
      best = a;
      best_value = v;
      tied = 1;
    } else if (v == best_value && tie_break == TieBreak::Uniform) {
      // Reservoir sampling over the tied set.
      ++tied;
      if (ties.index(tied) == 0) best = a;
    }
  }
  return best;
}

std::size_t thompson_arm(const AlgorithmState& state, AlgorithmStreams& streams) {
  const auto& post = state.posteriors();
  std::size_t best = 0;
  double best_sample = -1.0;
  for (std::size_t a = 0; a < post.size(); ++a) {
    const double s = streams.samples.beta(post[a].alpha, post[a].beta);
    if (s > best_sample) {
      best = a;
      best_sample = s;
    }
  }
  return best;
}

std::size_t base_arm(const AlgorithmState& state, AlgorithmTag tag, double epsilon, AlgorithmStreams& streams) {
  const TieBreak tb = state.kind().tie_break;
  switch (tag) {
    case AlgorithmTag::BayesGreedy:
      return greedy_arm(state, tb, streams.ties);
    case AlgorithmTag::BayesEpsilonGreedy:
      if (streams.explore_coin.bernoulli(epsilon)) return streams.explore_arm.index(state.arms());
      return greedy_arm(state, tb, streams.ties);
    case AlgorithmTag::ThompsonSampling:
      return thompson_arm(state, streams);
    case AlgorithmTag::StaticGreedy:
      // The Beta(1,1) prior means are all equal.
      return 0;
    case AlgorithmTag::GreedyModification:
      break;
  }
  throw std::logic_error("greedy modification cannot be its own inner algorithm");
}

}  // namespace

AlgorithmKind AlgorithmKind::epsilon_greedy(double epsilon) {
  AlgorithmKind k;
  k.tag = AlgorithmTag::BayesEpsilonGreedy;
  k.epsilon = epsilon;
  return k;
}

AlgorithmKind AlgorithmKind::thompson() {
  AlgorithmKind k;
  k.tag = AlgorithmTag::ThompsonSampling;
  return k;
}

AlgorithmKind AlgorithmKind::static_greedy() {
  AlgorithmKind k;
  k.tag = AlgorithmTag::StaticGreedy;
  return k;
}

AlgorithmKind AlgorithmKind::greedy_modification(AlgorithmTag inner, double mix_p, int switch_step, double epsilon) {
  AlgorithmKind k;
  k.tag = AlgorithmTag::GreedyModification;
  k.inner = inner;
  k.mix_p = mix_p;
  k.switch_step = switch_step;
  k.epsilon = epsilon;
  return k;
}

AlgorithmKind AlgorithmKind::inner_kind() const {
  if (tag != AlgorithmTag::GreedyModification) return *this;
  AlgorithmKind k;
  k.tag = inner;
  k.epsilon = epsilon;
  k.tie_break = tie_break;
  return k;
}

void AlgorithmKind::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError(fmt::format("epsilon {} outside [0,1]", epsilon));
  if (tag == AlgorithmTag::GreedyModification) {
    if (inner != AlgorithmTag::BayesEpsilonGreedy && inner != AlgorithmTag::ThompsonSampling) {
      throw ConfigError("greedy modification wraps epsilon-greedy or Thompson sampling");
    }
    if (!(mix_p > 0.0 && mix_p < 1.0)) throw ConfigError(fmt::format("mixing parameter p={} outside (0,1)", mix_p));
    if (switch_step < 1) throw ConfigError("greedy modification needs n0 >= 1");
  }
}

std::string AlgorithmKind::name() const {
  switch (tag) {
    case AlgorithmTag::BayesGreedy:
      return "dg";
    case AlgorithmTag::BayesEpsilonGreedy:
      return epsilon == 0.05 ? "deg" : fmt::format("deg(eps={})", epsilon);
    case AlgorithmTag::ThompsonSampling:
      return "ts";
    case AlgorithmTag::StaticGreedy:
      return "sg";
    case AlgorithmTag::GreedyModification:
      return fmt::format("greedy_mod({},p={},n0={})", inner_kind().name(), mix_p, switch_step);
  }
  return "unknown";
}

AlgorithmTag parse_algorithm_tag(std::string_view name) {
  if (name == "dg") return AlgorithmTag::BayesGreedy;
  if (name == "deg") return AlgorithmTag::BayesEpsilonGreedy;
  if (name == "ts") return AlgorithmTag::ThompsonSampling;
  if (name == "sg") return AlgorithmTag::StaticGreedy;
  if (name == "greedy_mod") return AlgorithmTag::GreedyModification;
  throw ConfigError(fmt::format("unknown algorithm '{}'", name));
}

std::string_view algorithm_tag_name(AlgorithmTag tag) {
  switch (tag) {
    case AlgorithmTag::BayesGreedy:
      return "dg";
    case AlgorithmTag::BayesEpsilonGreedy:
      return "deg";
    case AlgorithmTag::ThompsonSampling:
      return "ts";
    case AlgorithmTag::StaticGreedy:
      return "sg";
    case AlgorithmTag::GreedyModification:
      return "greedy_mod";
  }
  return "unknown";
}

AlgorithmStreams::AlgorithmStreams(const RngStream& parent)
    : explore_coin(parent.split(kExploreCoin)),
      explore_arm(parent.split(kExploreArm)),
      samples(parent.split(kSamples)),
      mix_coin(parent.split(kMixCoin)),
      ties(parent.split(kTies)) {}

AlgorithmState::AlgorithmState(AlgorithmKind kind, std::size_t arms) : kind_(kind), posteriors_(arms) {
  if (arms == 0) throw ConfigError("an algorithm needs at least one arm");
  kind_.validate();
}

void AlgorithmState::record(std::size_t arm, int reward, Recording recording) {
  if (arm >= posteriors_.size()) {
    throw std::out_of_range(fmt::format("arm {} out of range for {} arms", arm, posteriors_.size()));
  }
  if (recording == Recording::Unrecorded) return;
  posteriors_[arm] = posterior_update(posteriors_[arm], reward);
  ++recorded_;
}

std::size_t greedy_arm(const AlgorithmState& state, TieBreak tie_break, RngStream& ties) {
  const auto& post = state.posteriors();
  return argmax(post.size(), [&](std::size_t a) { return post[a].mean(); }, tie_break, ties);
}

ArmChoice next_arm(const AlgorithmState& state, AlgorithmStreams& streams) {
  const AlgorithmKind& kind = state.kind();
  if (kind.tag != AlgorithmTag::GreedyModification) {
    return {base_arm(state, kind.tag, kind.epsilon, streams), Recording::Recorded};
  }
  if (state.step() < static_cast<std::size_t>(kind.switch_step)) {
    return {greedy_arm(state, kind.tie_break, streams.ties), Recording::Recorded};
  }
  if (streams.mix_coin.bernoulli(kind.mix_p)) {
    return {greedy_arm(state, kind.tie_break, streams.ties), Recording::Unrecorded};
  }
  return {base_arm(state, kind.inner, kind.epsilon, streams), Recording::Recorded};
}

AlgorithmState observe(AlgorithmState state, std::size_t arm, int reward, Recording recording) {
  state.record(arm, reward, recording);
  return state;
}

}  // namespace compete
