#pragma once

// Activation-spreading action selection over a behavior network, with STRIPS
// execution against a simulated world.
//
// One update of spread_activation, with α the previous levels:
//   state input     y += φ / |requirers(p)|                 for p true, p ∈ cond(y)
//   goal input      y += γ / |achievers(g)|                 for unmet goal g ∈ add(y)
//   protection      y -= δ / |deleters(g)|                  for met goal g ∈ del(y)
//   forward         y += α_x (φ/γ) / |requirers(p)| / |cond(y)|
//                       for executable x, p ∈ add(x) false, p ∈ cond(y)
//   backward        y += α_x / |achievers(p)| / |add(y)|
//                       for non-executable x, p ∈ cond(x) false, p ∈ add(y)
//   inhibition      y -= α_x (δ/γ) / |deleters(p)| / |del(y)|
//                       for p ∈ cond(x) true, p ∈ del(y), y ≠ x
// Levels are then floored at zero and rescaled to mean π. Contributions to
// each agent are summed in sorted order so results do not depend on agent
// naming.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ananet/error.hpp"
#include "ananet/network.hpp"

namespace ananet {

using WorldState = StatusSet;

inline bool executable(const Agent& agent, const WorldState& world) {
  return std::all_of(agent.condition.begin(), agent.condition.end(),
                     [&](const Status& s) { return world.count(s) != 0; });
}

// (world \ delete) ∪ add. Throws NotExecutable listing the missing conditions.
inline WorldState apply(const Agent& agent, const WorldState& world) {
  std::vector<std::string> missing;
  for (const auto& s : agent.condition)
    if (!world.count(s)) missing.push_back(s.text());
  if (!missing.empty()) throw NotExecutable(agent.name, std::move(missing));
  WorldState next = world;
  for (const auto& s : agent.del) next.erase(s);
  next.insert(agent.add.begin(), agent.add.end());
  return next;
}

struct PlannerParams {
  double state_gain = 20.0;       // φ
  double goal_gain = 70.0;        // γ
  double protection_gain = 50.0;  // δ
  double mean_level = 20.0;       // π
  double initial_threshold = 45.0;
  double threshold_decay = 0.9;
  int max_steps = 200;
  std::uint64_t seed = 0;
  bool reset_winner = true;
  // Restore the threshold to initial_threshold after an agent fires.
  bool reset_threshold = false;

  void validate() const {
    if (state_gain < 0 || goal_gain < 0 || protection_gain < 0 || mean_level < 0 || initial_threshold < 0)
      throw InvalidConfig("planner gains, mean level and threshold must be non-negative");
    if (!(threshold_decay > 0.0 && threshold_decay < 1.0))
      throw InvalidConfig("threshold decay must lie in (0, 1)");
    if (max_steps < 1) throw InvalidConfig("max_steps must be at least 1");
  }
};

// Levels are indexed by agent id (Network::agents() order).
struct ActivationState {
  std::vector<double> level;
  double threshold = 0.0;
};

inline ActivationState initial_activation(const Network& net, const PlannerParams& params) {
  return ActivationState{std::vector<double>(net.agents().size(), 0.0), params.initial_threshold};
}

namespace detail {

using Truth = std::vector<char>;

inline Truth truth_of(const Network& net, const WorldState& world) {
  Truth t(net.status_list().size(), 0);
  for (const auto& s : world)
    if (auto id = net.status_id(s)) t[*id] = 1;
  return t;
}

inline bool executable_id(const LinkIndex& links, std::size_t a, const Truth& truth) {
  for (auto s : links.condition_ids[a])
    if (!truth[s]) return false;
  return true;
}

inline double sorted_sum(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

inline std::vector<std::size_t> goal_ids(const Network& net, const StatusSet& goals) {
  std::vector<std::size_t> ids;
  for (const auto& g : goals) {
    auto id = net.status_id(g);
    if (!id) throw GoalNotInNetwork(g.text());
    ids.push_back(*id);
  }
  return ids;
}

inline ActivationState spread(const Network& net, const Truth& truth, const std::vector<std::size_t>& goals,
                              const ActivationState& state, const PlannerParams& p) {
  const auto& L = net.links();
  const std::size_t n = net.agents().size();
  std::vector<std::vector<double>> contrib(n);
  for (std::size_t a = 0; a < n; ++a) contrib[a].push_back(state.level[a]);

  const double forward_ratio = p.goal_gain > 0 ? p.state_gain / p.goal_gain : 0.0;
  const double inhibit_ratio = p.goal_gain > 0 ? p.protection_gain / p.goal_gain : 0.0;

  for (std::size_t s = 0; s < truth.size(); ++s) {
    if (!truth[s] || L.requirers[s].empty()) continue;
    const double share = p.state_gain / static_cast<double>(L.requirers[s].size());
    for (auto y : L.requirers[s]) contrib[y].push_back(share);
  }
  for (auto g : goals) {
    if (!truth[g]) {
      if (L.achievers[g].empty()) continue;
      const double share = p.goal_gain / static_cast<double>(L.achievers[g].size());
      for (auto y : L.achievers[g]) contrib[y].push_back(share);
    } else if (!L.deleters[g].empty()) {
      const double share = p.protection_gain / static_cast<double>(L.deleters[g].size());
      for (auto y : L.deleters[g]) contrib[y].push_back(-share);
    }
  }

  for (std::size_t x = 0; x < n; ++x) {
    const double alpha = state.level[x];
    if (alpha == 0.0) continue;
    if (executable_id(L, x, truth)) {
      for (auto s : L.add_ids[x]) {
        if (truth[s] || L.requirers[s].empty()) continue;
        const double share = alpha * forward_ratio / static_cast<double>(L.requirers[s].size());
        for (auto y : L.requirers[s]) contrib[y].push_back(share / static_cast<double>(L.condition_ids[y].size()));
      }
    } else {
      for (auto s : L.condition_ids[x]) {
        if (truth[s] || L.achievers[s].empty()) continue;
        const double share = alpha / static_cast<double>(L.achievers[s].size());
        for (auto y : L.achievers[s]) contrib[y].push_back(share / static_cast<double>(L.add_ids[y].size()));
      }
    }
    for (auto s : L.condition_ids[x]) {
      if (!truth[s] || L.deleters[s].empty()) continue;
      const double share = alpha * inhibit_ratio / static_cast<double>(L.deleters[s].size());
      for (auto y : L.deleters[s])
        if (y != x) contrib[y].push_back(-share / static_cast<double>(L.delete_ids[y].size()));
    }
  }

  ActivationState next{std::vector<double>(n, 0.0), state.threshold};
  for (std::size_t a = 0; a < n; ++a) next.level[a] = std::max(0.0, sorted_sum(contrib[a]));
  if (n == 0) return next;
  auto levels = next.level;
  const double total = sorted_sum(levels);
  const double target = p.mean_level * static_cast<double>(n);
  if (total > 0.0) {
    const double scale = target / total;
    for (auto& l : next.level) l *= scale;
  } else {
    std::fill(next.level.begin(), next.level.end(), p.mean_level);
  }
  return next;
}

// Tie-break order: by list contents, then name. Agents whose lists differ are
// ordered independently of their names.
inline std::vector<std::size_t> structural_rank(const Network& net) {
  const auto& agents = net.agents();
  auto signature = [](const Agent& a) {
    std::string sig;
    for (const auto* list : {&a.add, &a.condition, &a.del}) {
      for (const auto& s : *list) sig += s.text() + '\x1f';
      sig += '\x1e';
    }
    return sig;
  };
  std::vector<std::string> sigs;
  for (const auto& a : agents) sigs.push_back(signature(a));
  std::vector<std::size_t> order(agents.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (sigs[x] != sigs[y]) return sigs[x] < sigs[y];
    return agents[x].name < agents[y].name;
  });
  std::vector<std::size_t> rank(agents.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  return rank;
}

inline std::optional<std::size_t> select(const Network& net, const Truth& truth, ActivationState& state,
                                         const std::vector<std::size_t>& rank, std::mt19937_64& rng,
                                         bool reset_winner) {
  const auto& L = net.links();
  std::vector<std::size_t> best;
  double best_level = -1.0;
  for (std::size_t a = 0; a < net.agents().size(); ++a) {
    const double l = state.level[a];
    if (l < state.threshold || !executable_id(L, a, truth)) continue;
    if (l > best_level) {
      best_level = l;
      best.assign(1, a);
    } else if (l == best_level) {
      best.push_back(a);
    }
  }
  if (best.empty()) return std::nullopt;
  std::size_t winner = best.front();
  if (best.size() > 1) {
    std::sort(best.begin(), best.end(), [&](std::size_t x, std::size_t y) { return rank[x] < rank[y]; });
    winner = best[static_cast<std::size_t>(rng() % best.size())];
  }
  if (reset_winner) state.level[winner] = 0.0;
  return winner;
}

}  // namespace detail

// One synchronous update of the activation levels.
inline ActivationState spread_activation(const Network& net, const WorldState& world, const StatusSet& goals,
                                         const ActivationState& state, const PlannerParams& params) {
  return detail::spread(net, detail::truth_of(net, world), detail::goal_ids(net, goals), state, params);
}

// Picks the executable agent with the highest level at or above the threshold.
// Exact ties are broken by `rng`; the winner's level is reset to zero when
// params.reset_winner is set.
inline std::optional<std::size_t> select_action(const Network& net, const WorldState& world, ActivationState& state,
                                                 std::mt19937_64& rng, bool reset_winner = true) {
  return detail::select(net, detail::truth_of(net, world), state, detail::structural_rank(net), rng, reset_winner);
}

enum class Verdict { Success, StepBudgetExhausted, Deadlock };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Success: return "success";
    case Verdict::StepBudgetExhausted: return "step-budget-exhausted";
    case Verdict::Deadlock: return "deadlock";
  }
  return "?";
}

struct TraceStep {
  double threshold = 0.0;                // threshold the selection was made against
  std::optional<std::string> selected;   // none: threshold decayed instead
  WorldState world_before;
  WorldState world_after;
  std::vector<double> activation;        // levels after spreading, before the winner reset
};

struct Trace {
  std::vector<std::string> agent_names;  // index space of TraceStep::activation
  WorldState world0;
  std::vector<TraceStep> steps;
  Verdict verdict = Verdict::StepBudgetExhausted;

  std::vector<std::string> executed() const {
    std::vector<std::string> out;
    for (const auto& s : steps)
      if (s.selected) out.push_back(*s.selected);
    return out;
  }
};

// Runs spread -> select -> apply until the goals hold, no agent can ever
// fire again (Deadlock) or max_steps is used up.
inline Trace plan_execute(const Network& net, const WorldState& world0, const StatusSet& goals,
                          const PlannerParams& params) {
  params.validate();
  const auto goal_ids = detail::goal_ids(net, goals);
  const auto rank = detail::structural_rank(net);
  std::mt19937_64 rng(params.seed);

  Trace trace;
  for (const auto& a : net.agents()) trace.agent_names.push_back(a.name);
  trace.world0 = world0;

  WorldState world = world0;
  auto goals_met = [&] {
    return std::all_of(goals.begin(), goals.end(), [&](const Status& g) { return world.count(g) != 0; });
  };
  if (goals_met()) {
    trace.verdict = Verdict::Success;
    return trace;
  }

  auto state = initial_activation(net, params);
  for (int step = 0; step < params.max_steps; ++step) {
    auto truth = detail::truth_of(net, world);
    bool any_executable = false;
    for (std::size_t a = 0; a < net.agents().size() && !any_executable; ++a)
      any_executable = detail::executable_id(net.links(), a, truth);
    if (!any_executable) {
      trace.verdict = Verdict::Deadlock;
      return trace;
    }

    state = detail::spread(net, truth, goal_ids, state, params);
    TraceStep rec;
    rec.threshold = state.threshold;
    rec.activation = state.level;
    rec.world_before = world;
    auto winner = detail::select(net, truth, state, rank, rng, params.reset_winner);
    if (winner) {
      const auto& agent = net.agents()[*winner];
      world = ananet::apply(agent, world);
      rec.selected = agent.name;
      if (params.reset_threshold) state.threshold = params.initial_threshold;
    } else {
      state.threshold *= params.threshold_decay;
    }
    rec.world_after = world;
    trace.steps.push_back(std::move(rec));
    if (goals_met()) {
      trace.verdict = Verdict::Success;
      return trace;
    }
  }
  trace.verdict = Verdict::StepBudgetExhausted;
  return trace;
}

// Applies `plan` in order from `world0`; throws NotExecutable on the first
// agent whose conditions do not hold.
inline WorldState replay(const Network& net, const WorldState& world0, const std::vector<std::string>& plan) {
  WorldState world = world0;
  for (const auto& name : plan) {
    const Agent* a = net.find_agent(name);
    if (!a) throw Error("plan names unknown agent '" + name + "'");
    world = ananet::apply(*a, world);
  }
  return world;
}

inline bool replays_to_goals(const Network& net, const WorldState& world0, const std::vector<std::string>& plan,
                             const StatusSet& goals) {
  try {
    auto world = replay(net, world0, plan);
    return std::all_of(goals.begin(), goals.end(), [&](const Status& g) { return world.count(g) != 0; });
  } catch (const NotExecutable&) {
    return false;
  }
}

// Line-delimited trace records; the last line carries the verdict.
inline std::string export_trace(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& step = trace.steps[i];
    nlohmann::json j;
    j["step"] = i;
    j["theta"] = step.threshold;
    j["selected"] = step.selected ? nlohmann::json(*step.selected) : nlohmann::json(nullptr);
    auto added = nlohmann::json::array(), removed = nlohmann::json::array();
    for (const auto& s : step.world_after)
      if (!step.world_before.count(s)) added.push_back(s.text());
    for (const auto& s : step.world_before)
      if (!step.world_after.count(s)) removed.push_back(s.text());
    j["world_added"] = std::move(added);
    j["world_removed"] = std::move(removed);
    std::vector<std::size_t> order(step.activation.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (step.activation[x] != step.activation[y]) return step.activation[x] > step.activation[y];
      return trace.agent_names[x] < trace.agent_names[y];
    });
    auto top = nlohmann::json::array();
    for (std::size_t k = 0; k < order.size() && k < 5; ++k)
      top.push_back({{"agent", trace.agent_names[order[k]]}, {"level", step.activation[order[k]]}});
    j["top5_activations"] = std::move(top);
    out += j.dump() + "\n";
  }
  nlohmann::json fin;
  fin["verdict"] = verdict_name(trace.verdict);
  fin["steps"] = trace.steps.size();
  fin["executed"] = trace.executed().size();
  out += fin.dump() + "\n";
  return out;
}

}  // namespace ananet
