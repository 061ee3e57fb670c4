#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ananet/error.hpp"
#include "ananet/network.hpp"
#include "ananet/planner.hpp"

namespace ananet {

struct SearchOptions {
  int max_depth = 12;
  std::size_t state_cap = 1'000'000;
  // Networks above 50 agents are refused unless this is set.
  bool allow_large = false;
};

namespace detail {

struct BitState {
  std::vector<std::uint64_t> words;
  bool operator==(const BitState&) const = default;
  bool test(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
};

struct BitStateHash {
  std::size_t operator()(const BitState& s) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto w : s.words) {
      h ^= w;
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

// Breadth-first search over world states under STRIPS semantics. Returns a
// shortest plan (agent names in order) or nullopt when the goals are not
// reachable within max_depth. Agents are expanded in name order, so the
// returned plan is deterministic.
inline std::optional<std::vector<std::string>> bfs_oracle(const Network& net, const WorldState& world0,
                                                          const StatusSet& goals, const SearchOptions& opts = {}) {
  if (net.agents().size() > 50 && !opts.allow_large)
    throw InvalidConfig("bfs_oracle refuses networks above 50 agents without allow_large");
  const auto goal_ids = detail::goal_ids(net, goals);
  const auto& L = net.links();
  const std::size_t nwords = (net.status_list().size() + 63) / 64;

  detail::BitState start{std::vector<std::uint64_t>(nwords, 0)};
  for (const auto& s : world0)
    if (auto id = net.status_id(s)) start.set(*id);

  auto satisfied = [&](const detail::BitState& st) {
    for (auto g : goal_ids)
      if (!st.test(g)) return false;
    return true;
  };

  struct Node {
    detail::BitState state;
    std::size_t parent;
    std::size_t agent;
    int depth;
  };
  std::vector<Node> nodes{{start, 0, 0, 0}};
  std::unordered_map<detail::BitState, std::size_t, detail::BitStateHash> seen{{start, 0}};
  std::deque<std::size_t> frontier{0};

  auto extract = [&](std::size_t idx) {
    std::vector<std::string> plan;
    while (idx != 0) {
      plan.push_back(net.agents()[nodes[idx].agent].name);
      idx = nodes[idx].parent;
    }
    return std::vector<std::string>(plan.rbegin(), plan.rend());
  };

  if (satisfied(start)) return std::vector<std::string>{};
  while (!frontier.empty()) {
    const auto cur = frontier.front();
    frontier.pop_front();
    if (nodes[cur].depth >= opts.max_depth) continue;
    for (std::size_t a = 0; a < net.agents().size(); ++a) {
      const auto& st = nodes[cur].state;
      bool ok = true;
      for (auto c : L.condition_ids[a])
        if (!st.test(c)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      detail::BitState next = st;
      for (auto d : L.delete_ids[a]) next.reset(d);
      for (auto s : L.add_ids[a]) next.set(s);
      if (seen.count(next)) continue;
      if (nodes.size() >= opts.state_cap) throw SearchBudgetExceeded(opts.state_cap);
      nodes.push_back({next, cur, a, nodes[cur].depth + 1});
      seen.emplace(std::move(next), nodes.size() - 1);
      if (satisfied(nodes.back().state)) return extract(nodes.size() - 1);
      frontier.push_back(nodes.size() - 1);
    }
  }
  return std::nullopt;
}

}  // namespace ananet
