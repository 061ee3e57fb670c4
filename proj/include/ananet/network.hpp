#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ananet/agent.hpp"
#include "ananet/error.hpp"
#include "ananet/status.hpp"

namespace ananet {

// Derived adjacency of a network. Agent and status ids index into
// Network::agents() and Network::status_list(); every inner vector is sorted.
struct LinkIndex {
  // successors[a] holds b iff add(a) ∩ condition(b) ≠ ∅.
  std::vector<std::vector<std::size_t>> successors;
  std::vector<std::vector<std::size_t>> predecessors;
  // conflicters[a] holds b iff delete(a) ∩ condition(b) ≠ ∅.
  std::vector<std::vector<std::size_t>> conflicters;

  // Per-agent list contents as status ids.
  std::vector<std::vector<std::size_t>> add_ids, condition_ids, delete_ids;
  // Per-status agents that add / require / delete it.
  std::vector<std::vector<std::size_t>> achievers, requirers, deleters;

  bool operator==(const LinkIndex&) const = default;
};

namespace detail {

inline std::vector<std::size_t> ids_of(const StatusSet& set, const std::vector<Status>& sorted_statuses,
                                       const std::string& agent) {
  std::vector<std::size_t> ids;
  ids.reserve(set.size());
  for (const auto& s : set) {
    auto it = std::lower_bound(sorted_statuses.begin(), sorted_statuses.end(), s);
    if (it == sorted_statuses.end() || !(*it == s)) throw DanglingStatus(agent, s.text());
    ids.push_back(static_cast<std::size_t>(it - sorted_statuses.begin()));
  }
  return ids;
}

inline void sort_unique(std::vector<std::size_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

// Pure function of the agent lists. Throws DanglingStatus if an agent names a
// status outside `sorted_statuses`.
inline LinkIndex derive_links(const std::vector<Status>& sorted_statuses, const std::vector<Agent>& agents) {
  LinkIndex idx;
  const std::size_t n = agents.size();
  idx.successors.resize(n);
  idx.predecessors.resize(n);
  idx.conflicters.resize(n);
  idx.achievers.resize(sorted_statuses.size());
  idx.requirers.resize(sorted_statuses.size());
  idx.deleters.resize(sorted_statuses.size());
  for (std::size_t a = 0; a < n; ++a) {
    idx.add_ids.push_back(detail::ids_of(agents[a].add, sorted_statuses, agents[a].name));
    idx.condition_ids.push_back(detail::ids_of(agents[a].condition, sorted_statuses, agents[a].name));
    idx.delete_ids.push_back(detail::ids_of(agents[a].del, sorted_statuses, agents[a].name));
    for (auto s : idx.add_ids[a]) idx.achievers[s].push_back(a);
    for (auto s : idx.condition_ids[a]) idx.requirers[s].push_back(a);
    for (auto s : idx.delete_ids[a]) idx.deleters[s].push_back(a);
  }
  for (std::size_t s = 0; s < sorted_statuses.size(); ++s) {
    for (auto a : idx.achievers[s])
      for (auto b : idx.requirers[s]) {
        idx.successors[a].push_back(b);
        idx.predecessors[b].push_back(a);
      }
    for (auto a : idx.deleters[s])
      for (auto b : idx.requirers[s]) idx.conflicters[a].push_back(b);
  }
  for (auto* rel : {&idx.successors, &idx.predecessors, &idx.conflicters})
    for (auto& v : *rel) detail::sort_unique(v);
  return idx;
}

// Immutable behavior network: agents sorted by name, statuses sorted by text,
// links derived once at construction.
class Network {
public:
  Network() = default;

  // Strict constructor. Every status in an agent list must be declared, names
  // must be unique and seeds must be declared statuses.
  static Network create(std::vector<Status> seeds, StatusSet statuses, std::vector<Agent> agents) {
    Network n;
    std::sort(agents.begin(), agents.end(), [](const Agent& a, const Agent& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < agents.size(); ++i)
      if (agents[i].name == agents[i - 1].name) throw DuplicateAgent(agents[i].name);
    for (const auto& s : seeds)
      if (!statuses.count(s)) throw UnknownSeed(s.text());
    n.status_list_.assign(statuses.begin(), statuses.end());
    n.links_ = derive_links(n.status_list_, agents);
    n.statuses_ = std::move(statuses);
    n.agents_ = std::move(agents);
    for (auto& s : seeds)
      if (std::find(n.seeds_.begin(), n.seeds_.end(), s) == n.seeds_.end()) n.seeds_.push_back(std::move(s));
    return n;
  }

  // Declares every status mentioned by the agents (plus seeds and `extra`).
  static Network from_agents(std::vector<Agent> agents, std::vector<Status> seeds = {}, StatusSet extra = {}) {
    for (const auto& a : agents)
      for (const auto* list : {&a.add, &a.condition, &a.del}) extra.insert(list->begin(), list->end());
    extra.insert(seeds.begin(), seeds.end());
    return create(std::move(seeds), std::move(extra), std::move(agents));
  }

  const std::vector<Agent>& agents() const noexcept { return agents_; }
  const StatusSet& statuses() const noexcept { return statuses_; }
  const std::vector<Status>& status_list() const noexcept { return status_list_; }
  const std::vector<Status>& seeds() const noexcept { return seeds_; }
  const LinkIndex& links() const noexcept { return links_; }

  bool contains(const Status& s) const { return statuses_.count(s) != 0; }

  std::optional<std::size_t> status_id(const Status& s) const {
    auto it = std::lower_bound(status_list_.begin(), status_list_.end(), s);
    if (it == status_list_.end() || !(*it == s)) return std::nullopt;
    return static_cast<std::size_t>(it - status_list_.begin());
  }

  std::optional<std::size_t> agent_id(std::string_view name) const {
    auto it = std::lower_bound(agents_.begin(), agents_.end(), name,
                               [](const Agent& a, std::string_view n) { return a.name < n; });
    if (it == agents_.end() || it->name != name) return std::nullopt;
    return static_cast<std::size_t>(it - agents_.begin());
  }

  const Agent* find_agent(std::string_view name) const {
    auto id = agent_id(name);
    return id ? &agents_[*id] : nullptr;
  }

  // Agents, statuses, seeds and provenance.
  friend bool operator==(const Network& a, const Network& b) {
    if (a.statuses_ != b.statuses_ || a.seeds_ != b.seeds_ || a.agents_.size() != b.agents_.size()) return false;
    for (std::size_t i = 0; i < a.agents_.size(); ++i)
      if (!(a.agents_[i] == b.agents_[i]) || a.agents_[i].provenance != b.agents_[i].provenance) return false;
    return true;
  }

private:
  StatusSet statuses_;
  std::vector<Status> status_list_;
  std::vector<Agent> agents_;
  std::vector<Status> seeds_;
  LinkIndex links_;
};

inline ValidationReport validate_network(const Network& net, bool lenient = false) {
  ValidationReport report;
  for (const auto& a : net.agents()) {
    auto r = validate_agent(a, lenient);
    report.violations.insert(report.violations.end(), r.violations.begin(), r.violations.end());
  }
  return report;
}

// Alternating hop counts from a seed status: status d -> achieving agent d+1
// -> that agent's conditions d+2. Unreachable nodes are absent.
struct DistanceMap {
  std::map<std::string, int> statuses;
  std::map<std::string, int> agents;

  std::optional<int> of_status(const Status& s) const {
    auto it = statuses.find(s.text());
    return it == statuses.end() ? std::nullopt : std::optional<int>(it->second);
  }
  std::optional<int> of_agent(std::string_view name) const {
    auto it = agents.find(std::string(name));
    return it == agents.end() ? std::nullopt : std::optional<int>(it->second);
  }
};

inline DistanceMap distance_map(const Network& net, const Status& seed) {
  auto seed_id = net.status_id(seed);
  if (!seed_id) throw UnknownSeed(seed.text());
  const auto& links = net.links();
  std::vector<int> sdist(net.status_list().size(), -1), adist(net.agents().size(), -1);
  std::deque<std::size_t> queue{*seed_id};
  sdist[*seed_id] = 0;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (auto a : links.achievers[s]) {
      if (adist[a] >= 0) continue;
      adist[a] = sdist[s] + 1;
      for (auto c : links.condition_ids[a]) {
        if (sdist[c] >= 0) continue;
        sdist[c] = adist[a] + 1;
        queue.push_back(c);
      }
    }
  }
  DistanceMap dm;
  for (std::size_t i = 0; i < sdist.size(); ++i)
    if (sdist[i] >= 0) dm.statuses.emplace(net.status_list()[i].text(), sdist[i]);
  for (std::size_t i = 0; i < adist.size(); ++i)
    if (adist[i] >= 0) dm.agents.emplace(net.agents()[i].name, adist[i]);
  return dm;
}

// Agents within `max_distance` of `seed`, closed over their lists. This is how
// the "distance N" networks are cut from a larger one.
inline Network subnetwork_within(const Network& net, const Status& seed, int max_distance) {
  const auto dm = distance_map(net, seed);
  std::vector<Agent> kept;
  for (const auto& a : net.agents()) {
    auto d = dm.of_agent(a.name);
    if (d && *d <= max_distance) kept.push_back(a);
  }
  return Network::from_agents(std::move(kept), {seed});
}

}  // namespace ananet
