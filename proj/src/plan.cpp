#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <yaml-cpp/yaml.h>

#include "compete/harness.hpp"

namespace compete {

Experiment parse_experiment(std::string_view name) {
  if (name == "duopoly") return Experiment::Duopoly;
  if (name == "nfirms") return Experiment::NFirms;
  if (name == "isolation") return Experiment::Isolation;
  if (name == "theory") return Experiment::Theory;
  throw ConfigError(fmt::format("unknown experiment '{}'", name));
}

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Duopoly:
      return "duopoly";
    case Experiment::NFirms:
      return "nfirms";
    case Experiment::Isolation:
      return "isolation";
    case Experiment::Theory:
      return "theory";
  }
  return "unknown";
}

ExperimentPlan::ExperimentPlan() {
  algorithms["dg"] = AlgorithmKind::bayes_greedy();
  algorithms["deg"] = AlgorithmKind::epsilon_greedy();
  algorithms["ts"] = AlgorithmKind::thompson();
  algorithms["sg"] = AlgorithmKind::static_greedy();
}

const AlgorithmKind& ExperimentPlan::algorithm(const std::string& name) const {
  auto it = algorithms.find(name);
  if (it == algorithms.end()) throw ConfigError(fmt::format("unknown algorithm '{}'", name));
  return it->second;
}

void ExperimentPlan::validate() const {
  if (N < 1) throw ConfigError("N must be at least 1");
  if (arms < 1) throw ConfigError("arms must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (smooth < 1) throw ConfigError("smooth must be at least 1");
  if (instances.empty()) throw ConfigError("plan lists no instances");
  if (T.empty() || T0.empty() || X.empty() || variants.empty()) throw ConfigError("T, T0, X and variants must be non-empty");
  for (std::size_t t : T) {
    if (t < 1) throw ConfigError("T must be at least 1");
  }
  if (M < 1) throw ConfigError("M must be at least 1");
  for (const auto& i : instances) i.validate();
  response.validate();
  for (const auto& [name, kind] : algorithms) kind.validate();
  switch (experiment) {
    case Experiment::Duopoly:
      if (pairs.empty()) throw ConfigError("duopoly plan needs pairs");
      for (const auto& [a, b] : pairs) {
        algorithm(a);
        algorithm(b);
      }
      break;
    case Experiment::NFirms:
      if (firm_lists.empty()) throw ConfigError("nfirms plan needs firms");
      for (const auto& list : firm_lists) {
        if (list.size() < 2) throw ConfigError("each firm list needs at least two firms");
        if (list.size() > 2 && response.tag == ResponseTag::SoftMax) {
          throw ConfigError("softmax response is defined for two firms");
        }
        for (const auto& a : list) algorithm(a);
      }
      break;
    case Experiment::Isolation: {
      if (solo.empty()) throw ConfigError("isolation plan needs solo algorithms");
      for (const auto& a : solo) algorithm(a);
      const std::set<std::string> names(solo.begin(), solo.end());
      for (const auto& [a, b] : relative) {
        if (!names.count(a) || !names.count(b)) throw ConfigError("relative pairs must name solo algorithms");
      }
      for (std::size_t x : X) {
        if (x != 0) throw ConfigError("isolation runs have no incumbency period");
      }
      break;
    }
    case Experiment::Theory:
      break;
  }
}

namespace {

template <typename T>
T as(const YAML::Node& n, std::string_view what) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("bad value for '{}'", what));
  }
}

std::vector<std::size_t> size_list(const YAML::Node& n, std::string_view what) {
  std::vector<std::size_t> out;
  if (n.IsSequence()) {
    for (const auto& x : n) out.push_back(as<std::size_t>(x, what));
  } else {
    out.push_back(as<std::size_t>(n, what));
  }
  return out;
}

std::vector<std::string> string_list(const YAML::Node& n, std::string_view what) {
  std::vector<std::string> out;
  if (n.IsSequence()) {
    for (const auto& x : n) out.push_back(as<std::string>(x, what));
  } else {
    out.push_back(as<std::string>(n, what));
  }
  return out;
}

void reject_unknown(const YAML::Node& map, std::initializer_list<std::string_view> keys, std::string_view where) {
  for (const auto& kv : map) {
    const auto k = kv.first.as<std::string>();
    bool ok = false;
    for (auto allowed : keys) ok = ok || k == allowed;
    if (!ok) throw ConfigError(fmt::format("unknown key '{}' in {}", k, where));
  }
}

InstanceKind parse_instance(const YAML::Node& n) {
  InstanceKind k;
  if (n.IsScalar()) {
    k.tag = parse_instance_tag(n.as<std::string>());
    return k;
  }
  if (!n.IsMap()) throw ConfigError("instance must be a name or a map");
  reject_unknown(n, {"type", "needle_mean", "haystack_mean", "lo", "hi", "a", "b"}, "instance");
  k.tag = parse_instance_tag(as<std::string>(n["type"], "instance type"));
  if (n["needle_mean"]) k.needle_mean = as<double>(n["needle_mean"], "needle_mean");
  if (n["haystack_mean"]) k.haystack_mean = as<double>(n["haystack_mean"], "haystack_mean");
  if (n["lo"]) k.uniform_lo = as<double>(n["lo"], "lo");
  if (n["hi"]) k.uniform_hi = as<double>(n["hi"], "hi");
  if (n["a"]) k.beta_a = as<double>(n["a"], "a");
  if (n["b"]) k.beta_b = as<double>(n["b"], "b");
  return k;
}

ResponseFunction parse_response(const YAML::Node& n) {
  ResponseFunction f;
  if (n.IsScalar()) {
    f.tag = parse_response_tag(n.as<std::string>());
    return f;
  }
  reject_unknown(n, {"type", "epsilon", "base", "tie_prob"}, "response");
  f.tag = parse_response_tag(as<std::string>(n["type"], "response type"));
  if (n["epsilon"]) f.epsilon = as<double>(n["epsilon"], "epsilon");
  if (n["base"]) f.base = as<double>(n["base"], "base");
  if (n["tie_prob"]) f.tie_prob = as<double>(n["tie_prob"], "tie_prob");
  return f;
}

AlgorithmKind parse_algorithm(const YAML::Node& n) {
  reject_unknown(n, {"algorithm", "epsilon", "inner", "p", "n0", "tie_break"}, "algorithm");
  AlgorithmKind k;
  k.tag = parse_algorithm_tag(as<std::string>(n["algorithm"], "algorithm"));
  if (n["epsilon"]) k.epsilon = as<double>(n["epsilon"], "epsilon");
  if (n["inner"]) k.inner = parse_algorithm_tag(as<std::string>(n["inner"], "inner"));
  if (n["p"]) k.mix_p = as<double>(n["p"], "p");
  if (n["n0"]) k.switch_step = as<int>(n["n0"], "n0");
  if (n["tie_break"]) {
    const auto tb = as<std::string>(n["tie_break"], "tie_break");
    if (tb == "lowest") {
      k.tie_break = TieBreak::LowestIndex;
    } else if (tb == "uniform") {
      k.tie_break = TieBreak::Uniform;
    } else {
      throw ConfigError(fmt::format("unknown tie_break '{}'", tb));
    }
  }
  return k;
}

std::vector<std::pair<std::string, std::string>> parse_pairs(const YAML::Node& n, std::string_view what) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : n) {
    const auto v = string_list(p, what);
    if (v.size() != 2) throw ConfigError(fmt::format("each entry of '{}' must have two names", what));
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

TheoryConfig parse_theory(const YAML::Node& n) {
  reject_unknown(n,
                 {"support", "weights", "horizon", "monotone_horizon", "audit_horizon", "perturb_scale", "epsilon", "p",
                  "n0", "hmr_epsilon", "synthetic_c1", "synthetic_c2", "synthetic_hmr_epsilon", "synthetic_horizon",
                  "softmax_base", "softmax_delta0"},
                 "theory");
  TheoryConfig c;
  if (n["support"]) c.support = as<std::vector<double>>(n["support"], "support");
  if (n["weights"]) c.weights = as<std::vector<std::vector<double>>>(n["weights"], "weights");
  if (n["horizon"]) c.horizon = as<std::size_t>(n["horizon"], "horizon");
  if (n["monotone_horizon"]) c.monotone_horizon = as<std::size_t>(n["monotone_horizon"], "monotone_horizon");
  if (n["audit_horizon"]) c.audit_horizon = as<std::size_t>(n["audit_horizon"], "audit_horizon");
  if (n["perturb_scale"]) c.perturb_scale = as<double>(n["perturb_scale"], "perturb_scale");
  if (n["epsilon"]) c.epsilon = as<double>(n["epsilon"], "epsilon");
  if (n["p"]) c.mix_p = as<double>(n["p"], "p");
  if (n["n0"]) c.switch_step = as<int>(n["n0"], "n0");
  if (n["hmr_epsilon"]) c.hmr_epsilon = as<double>(n["hmr_epsilon"], "hmr_epsilon");
  if (n["synthetic_c1"]) c.synthetic_c1 = as<double>(n["synthetic_c1"], "synthetic_c1");
  if (n["synthetic_c2"]) c.synthetic_c2 = as<double>(n["synthetic_c2"], "synthetic_c2");
  if (n["synthetic_hmr_epsilon"]) c.synthetic_hmr_epsilon = as<double>(n["synthetic_hmr_epsilon"], "synthetic_hmr_epsilon");
  if (n["synthetic_horizon"]) c.synthetic_horizon = as<std::size_t>(n["synthetic_horizon"], "synthetic_horizon");
  if (n["softmax_base"]) c.softmax_base = as<double>(n["softmax_base"], "softmax_base");
  if (n["softmax_delta0"]) c.softmax_delta0 = as<double>(n["softmax_delta0"], "softmax_delta0");
  return c;
}

}  // namespace

ExperimentPlan parse_plan(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("plan is not valid: {}", e.what()));
  }
  if (!root.IsMap()) throw ConfigError("plan must be a key/value map");
  reject_unknown(root,
                 {"name", "experiment", "seed", "N", "arms", "instances", "T", "T0", "X", "M", "response", "variants",
                  "algorithms", "pairs", "firms", "solo", "relative", "smooth", "workers", "output", "theory"},
                 "plan");
  ExperimentPlan plan;
  if (root["name"]) plan.name = as<std::string>(root["name"], "name");
  if (root["experiment"]) plan.experiment = parse_experiment(as<std::string>(root["experiment"], "experiment"));
  if (root["seed"]) plan.seed = as<std::uint64_t>(root["seed"], "seed");
  if (root["N"]) plan.N = as<std::size_t>(root["N"], "N");
  if (root["arms"]) plan.arms = as<Index>(root["arms"], "arms");
  if (root["instances"]) {
    plan.instances.clear();
    const auto n = root["instances"];
    if (n.IsSequence()) {
      for (const auto& i : n) plan.instances.push_back(parse_instance(i));
    } else {
      plan.instances.push_back(parse_instance(n));
    }
  }
  if (root["T"]) plan.T = size_list(root["T"], "T");
  if (root["T0"]) plan.T0 = size_list(root["T0"], "T0");
  if (root["X"]) plan.X = size_list(root["X"], "X");
  if (root["M"]) plan.M = as<std::size_t>(root["M"], "M");
  if (root["response"]) plan.response = parse_response(root["response"]);
  if (root["variants"]) {
    plan.variants.clear();
    for (const auto& v : string_list(root["variants"], "variants")) plan.variants.push_back(parse_variant(v));
  }
  if (root["algorithms"]) {
    for (const auto& kv : root["algorithms"]) plan.algorithms[kv.first.as<std::string>()] = parse_algorithm(kv.second);
  }
  if (root["pairs"]) plan.pairs = parse_pairs(root["pairs"], "pairs");
  if (root["firms"]) {
    for (const auto& f : root["firms"]) plan.firm_lists.push_back(string_list(f, "firms"));
  }
  if (root["solo"]) plan.solo = string_list(root["solo"], "solo");
  if (root["relative"]) plan.relative = parse_pairs(root["relative"], "relative");
  if (root["smooth"]) plan.smooth = as<std::size_t>(root["smooth"], "smooth");
  if (root["workers"]) plan.workers = as<std::size_t>(root["workers"], "workers");
  if (root["output"]) plan.output = as<std::string>(root["output"], "output");
  if (root["theory"]) plan.theory = parse_theory(root["theory"]);
  if (plan.experiment == Experiment::Isolation && !root["T0"]) plan.T0 = {0};
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read plan {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str());
}

std::string canonical_plan(const ExperimentPlan& p) {
  std::string s;
  auto add = [&](std::string_view k, const std::string& v) { s += fmt::format("{}={}\n", k, v); };
  add("name", p.name);
  add("experiment", std::string(experiment_name(p.experiment)));
  add("seed", std::to_string(p.seed));
  add("N", std::to_string(p.N));
  add("arms", std::to_string(p.arms));
  std::vector<std::string> inst;
  for (const auto& i : p.instances) inst.push_back(i.descriptor());
  add("instances", fmt::format("{}", fmt::join(inst, ";")));
  add("T", fmt::format("{}", fmt::join(p.T, ";")));
  add("T0", fmt::format("{}", fmt::join(p.T0, ";")));
  add("X", fmt::format("{}", fmt::join(p.X, ";")));
  add("M", std::to_string(p.M));
  add("response", fmt::format("{}|{}|{}|{}", static_cast<int>(p.response.tag), p.response.epsilon, p.response.base,
                              p.response.tie_prob));
  std::vector<std::string> vars;
  for (auto v : p.variants) vars.emplace_back(variant_name(v));
  add("variants", fmt::format("{}", fmt::join(vars, ";")));
  for (const auto& [name, k] : p.algorithms) {
    add("algorithm." + name, fmt::format("{}|{}|{}|{}|{}|{}", static_cast<int>(k.tag), k.epsilon, static_cast<int>(k.inner),
                                         k.mix_p, k.switch_step, static_cast<int>(k.tie_break)));
  }
  for (const auto& [a, b] : p.pairs) add("pair", a + ";" + b);
  for (const auto& l : p.firm_lists) add("firms", fmt::format("{}", fmt::join(l, ";")));
  add("solo", fmt::format("{}", fmt::join(p.solo, ";")));
  for (const auto& [a, b] : p.relative) add("relative", a + ";" + b);
  add("smooth", std::to_string(p.smooth));
  const TheoryConfig& t = p.theory;
  std::vector<std::string> w;
  for (const auto& row : t.weights) w.push_back(fmt::format("{}", fmt::join(row, ":")));
  add("theory", fmt::format("{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}", fmt::join(t.support, ":"), fmt::join(w, "/"),
                            t.horizon, t.monotone_horizon, t.audit_horizon, t.perturb_scale, t.epsilon, t.mix_p,
                            t.switch_step, t.hmr_epsilon, t.synthetic_c1, t.synthetic_c2, t.synthetic_hmr_epsilon,
                            t.synthetic_horizon, t.softmax_base, t.softmax_delta0));
  return s;
}

std::string plan_hash(const ExperimentPlan& plan) { return fmt::format("{:016x}", hash_name(canonical_plan(plan))); }

std::size_t effective_workers(const ExperimentPlan& plan) {
  if (const char* env = std::getenv("COMPETE_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw ConfigError(fmt::format("COMPETE_WORKERS='{}' is not a positive integer", env));
    return v;
  }
  return plan.workers;
}

std::vector<Cell> expand_cells(const ExperimentPlan& plan) {
  std::vector<std::vector<std::string>> lists;
  switch (plan.experiment) {
    case Experiment::Duopoly:
      for (const auto& [a, b] : plan.pairs) lists.push_back({a, b});
      break;
    case Experiment::NFirms:
      lists = plan.firm_lists;
      break;
    case Experiment::Isolation:
      for (const auto& a : plan.solo) lists.push_back({a});
      break;
    case Experiment::Theory:
      return {};
  }
  std::vector<Cell> cells;
  for (const auto& inst : plan.instances) {
    for (const auto& firms : lists) {
      for (std::size_t T : plan.T) {
        for (std::size_t T0 : plan.T0) {
          for (std::size_t X : plan.X) {
            for (Variant v : plan.variants) {
              Cell c;
              c.instance = &inst;
              c.firms = firms;
              c.game.T = T;
              c.game.T0 = T0;
              c.game.X = X;
              c.game.M = plan.M;
              c.game.variant = v;
              c.game.response = plan.response;
              std::vector<std::string> kinds;
              for (const auto& f : firms) {
                c.game.firms.push_back(plan.algorithm(f));
                kinds.push_back(plan.algorithm(f).name());
              }
              c.key = fmt::format("{}|K={}|{}|T={}|T0={}|X={}|M={}|{}|{}", inst.descriptor(), plan.arms,
                                  fmt::join(kinds, "+"), T, T0, X, plan.M, variant_name(v), plan.response.name());
              cells.push_back(std::move(c));
            }
          }
        }
      }
    }
  }
  return cells;
}

}  // namespace compete
