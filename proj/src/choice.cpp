#include "compete/choice.hpp"

#include <cmath>

#include <fmt/format.h>

namespace compete {

ReputationWindow::ReputationWindow(std::size_t capacity) : buffer_(capacity) {
  if (capacity == 0) throw ConfigError("reputation window size must be positive");
}

void ReputationWindow::push(int reward) {
  const auto r = static_cast<std::uint8_t>(reward != 0 ? 1 : 0);
  if (size_ == buffer_.size()) {
    ones_ -= buffer_[head_];
    buffer_[head_] = r;
    head_ = (head_ + 1) % buffer_.size();
  } else {
    buffer_[(head_ + size_) % buffer_.size()] = r;
    ++size_;
  }
  ones_ += r;
}

double ReputationWindow::score() const noexcept {
  if (size_ == 0) return 0.5;
  return static_cast<double>(ones_) / static_cast<double>(size_);
}

ResponseFunction ResponseFunction::hard_max(double tie_prob) {
  ResponseFunction f;
  f.tie_prob = tie_prob;
  return f;
}

ResponseFunction ResponseFunction::hard_max_random(double epsilon, double tie_prob) {
  ResponseFunction f;
  f.tag = ResponseTag::HardMaxRandom;
  f.epsilon = epsilon;
  f.tie_prob = tie_prob;
  return f;
}

ResponseFunction ResponseFunction::soft_max(double base) {
  ResponseFunction f;
  f.tag = ResponseTag::SoftMax;
  f.base = base;
  return f;
}

void ResponseFunction::validate() const {
  if (!(tie_prob >= 0.0 && tie_prob <= 1.0)) throw ConfigError(fmt::format("tie_prob {} outside [0,1]", tie_prob));
  if (tag == ResponseTag::HardMaxRandom && !(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError(fmt::format("epsilon_choice {} outside (0,1)", epsilon));
  }
  if (tag == ResponseTag::SoftMax && !(base > 1.0)) throw ConfigError(fmt::format("softmax_base {} must exceed 1", base));
}

std::string ResponseFunction::name() const {
  switch (tag) {
    case ResponseTag::HardMax:
      return tie_prob == 0.5 ? "hardmax" : fmt::format("hardmax(q0={})", tie_prob);
    case ResponseTag::HardMaxRandom:
      return tie_prob == 0.5 ? fmt::format("hmr(eps={})", epsilon) : fmt::format("hmr(eps={},q0={})", epsilon, tie_prob);
    case ResponseTag::SoftMax:
      return fmt::format("softmax(b={})", base);
  }
  return "unknown";
}

double ResponseFunction::prob_first(double delta, double tie_tolerance) const {
  const double hard = delta > tie_tolerance ? 1.0 : (delta < -tie_tolerance ? 0.0 : tie_prob);
  switch (tag) {
    case ResponseTag::HardMax:
      return hard;
    case ResponseTag::HardMaxRandom:
      return 0.5 * epsilon + (1.0 - epsilon) * hard;
    case ResponseTag::SoftMax:
      return 1.0 / (1.0 + std::pow(base, -delta));
  }
  return hard;
}

ResponseTag parse_response_tag(std::string_view name) {
  if (name == "hardmax") return ResponseTag::HardMax;
  if (name == "hmr") return ResponseTag::HardMaxRandom;
  if (name == "softmax") return ResponseTag::SoftMax;
  throw ConfigError(fmt::format("unknown response function '{}'", name));
}

namespace {

std::size_t hard_max_choice(const ResponseFunction& f, std::span<const double> scores, RngStream& rng) {
  if (scores.size() == 2) {
    if (scores[0] > scores[1]) return 0;
    if (scores[1] > scores[0]) return 1;
    return rng.bernoulli(f.tie_prob) ? 0 : 1;
  }
  std::size_t best = 0;
  std::size_t tied = 1;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) {
      best = i;
      tied = 1;
    } else if (scores[i] == scores[best]) {
      ++tied;
    }
  }
  if (tied == 1) return best;
  std::size_t pick = rng.index(tied);
  for (std::size_t i = best; i < scores.size(); ++i) {
    if (scores[i] == scores[best] && pick-- == 0) return i;
  }
  return best;
}

}  // namespace

std::size_t choose_firm(const ResponseFunction& f, std::span<const double> scores, RngStream& rng) {
  if (scores.empty()) throw ConfigError("choose_firm needs at least one firm");
  if (scores.size() == 1) return 0;
  switch (f.tag) {
    case ResponseTag::HardMax:
      return hard_max_choice(f, scores, rng);
    case ResponseTag::HardMaxRandom:
      if (rng.bernoulli(f.epsilon)) return rng.index(scores.size());
      return hard_max_choice(f, scores, rng);
    case ResponseTag::SoftMax:
      if (scores.size() != 2) throw ConfigError("softmax response is defined for two firms");
      return rng.bernoulli(f.prob_first(scores[0] - scores[1])) ? 0 : 1;
  }
  return 0;
}

SoftMaxConstants softmax_constants(const ResponseFunction& f, double delta0) {
  if (f.tag != ResponseTag::SoftMax) throw ConfigError("softmax constants need a softmax response");
  if (!(delta0 > 0.0 && delta0 <= 1.0)) throw ConfigError("delta0 must lie in (0,1]");
  // Logistic in base b: f'(x) = ln(b) f(x) (1 - f(x)), maximal at 0 and
  // symmetric, so the extremes on [-delta0, delta0] sit at 0 and delta0.
  const double lnb = std::log(f.base);
  const double edge = f.prob_first(delta0);
  SoftMaxConstants c;
  c.eps0 = f.baseline();
  c.c0 = lnb * edge * (1.0 - edge);
  c.c0_prime = lnb * 0.25;
  c.delta0 = delta0;
  return c;
}

}  // namespace compete
