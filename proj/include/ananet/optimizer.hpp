#pragma once

// Redundancy elimination. Statuses about the same object and agents with
// identical lists are grouped into classes, each collapsed onto its
// lexicographically least member.

#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ananet/agent.hpp"
#include "ananet/error.hpp"
#include "ananet/llm/backend.hpp"
#include "ananet/llm/parse.hpp"
#include "ananet/network.hpp"

namespace ananet {

enum class Justification { ExactDuplicate, BackendApproved };

inline std::string_view justification_name(Justification j) {
  return j == Justification::ExactDuplicate ? "exact-duplicate" : "backend-approved";
}

// Members are sorted; the representative is members.front().
struct MergeClass {
  std::string representative;
  std::vector<std::string> members;
  Justification justification = Justification::ExactDuplicate;
  bool operator==(const MergeClass&) const = default;
};

struct MergePlan {
  std::vector<MergeClass> status_classes;
  std::vector<MergeClass> agent_classes;

  bool empty() const { return status_classes.empty() && agent_classes.empty(); }
  bool operator==(const MergePlan&) const = default;
};

struct SimilarityOptions {
  // Yes/no samples per pair, majority wins.
  int samples = 1;
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

inline bool ask_similar(llm::Backend& backend, std::string_view template_id, const std::string& a, const std::string& b,
                        const SimilarityOptions& opts) {
  const int n = std::max(1, opts.samples);
  int yes = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<std::string, std::string>> params{{"a", a}, {"b", b}};
    if (n > 1) params.emplace_back("sample", std::to_string(i));
    if (llm::parse_yes_no(backend.complete(llm::CompletionRequest::make(template_id, std::move(params))))) ++yes;
  }
  return 2 * yes > n;
}

inline MergeClass make_class(std::vector<std::string> members, Justification j) {
  std::sort(members.begin(), members.end());
  return MergeClass{members.front(), std::move(members), j};
}

}  // namespace detail

// Candidates are statuses referencing the same object. Status texts are
// canonical, so two distinct statuses are never exact duplicates; without a
// backend the plan is empty.
inline MergePlan propose_status_merges(const Network& net, llm::Backend* backend,
                                       const SimilarityOptions& opts = {}) {
  MergePlan plan;
  if (!backend) return plan;
  const auto& list = net.status_list();
  std::map<std::string, std::vector<std::size_t>> by_object;
  for (std::size_t i = 0; i < list.size(); ++i)
    if (auto obj = list[i].referenced_object()) by_object[*obj].push_back(i);

  detail::UnionFind uf(list.size());
  for (const auto& [obj, ids] : by_object) {
    for (std::size_t x = 0; x < ids.size(); ++x)
      for (std::size_t y = x + 1; y < ids.size(); ++y) {
        if (uf.find(ids[x]) == uf.find(ids[y])) continue;
        if (detail::ask_similar(*backend, llm::templates::kStatusSimilarity, list[ids[x]].text(), list[ids[y]].text(),
                                opts))
          uf.unite(ids[x], ids[y]);
      }
  }
  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < list.size(); ++i) groups[uf.find(i)].push_back(list[i].text());
  for (auto& [root, members] : groups)
    if (members.size() > 1) plan.status_classes.push_back(detail::make_class(std::move(members), Justification::BackendApproved));
  return plan;
}

// Candidates are agents whose three lists are set-equal. Within a candidate
// group, agents with the same name key (articles, plurals and variant
// suffixes folded) are exact duplicates; different names are merged only when
// the backend judges the names equivalent.
inline MergePlan propose_agent_merges(const Network& net, llm::Backend* backend, const SimilarityOptions& opts = {}) {
  MergePlan plan;
  using Lists = std::tuple<StatusSet, StatusSet, StatusSet>;
  std::map<Lists, std::vector<std::size_t>> groups;
  const auto& agents = net.agents();
  for (std::size_t i = 0; i < agents.size(); ++i) groups[Lists{agents[i].add, agents[i].condition, agents[i].del}].push_back(i);

  for (const auto& [lists, ids] : groups) {
    if (ids.size() < 2) continue;
    std::map<std::string, std::vector<std::string>> by_key;
    for (auto i : ids) by_key[agent_name_key(agents[i].name)].push_back(agents[i].name);
    std::vector<MergeClass> exact;
    for (auto& [key, names] : by_key) exact.push_back(detail::make_class(std::move(names), Justification::ExactDuplicate));
    std::sort(exact.begin(), exact.end(),
              [](const MergeClass& a, const MergeClass& b) { return a.representative < b.representative; });

    detail::UnionFind uf(exact.size());
    if (backend) {
      for (std::size_t x = 0; x < exact.size(); ++x)
        for (std::size_t y = x + 1; y < exact.size(); ++y) {
          if (uf.find(x) == uf.find(y)) continue;
          if (detail::ask_similar(*backend, llm::templates::kAgentSimilarity, exact[x].representative,
                                  exact[y].representative, opts))
            uf.unite(x, y);
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> merged;
    for (std::size_t x = 0; x < exact.size(); ++x) merged[uf.find(x)].push_back(x);
    for (auto& [root, parts] : merged) {
      if (parts.size() == 1) {
        if (exact[parts.front()].members.size() > 1) plan.agent_classes.push_back(exact[parts.front()]);
        continue;
      }
      std::vector<std::string> members;
      for (auto x : parts) members.insert(members.end(), exact[x].members.begin(), exact[x].members.end());
      plan.agent_classes.push_back(detail::make_class(std::move(members), Justification::BackendApproved));
    }
  }
  std::sort(plan.agent_classes.begin(), plan.agent_classes.end(),
            [](const MergeClass& a, const MergeClass& b) { return a.representative < b.representative; });
  return plan;
}

// Rewrites every member onto its representative: statuses first (in all
// lists and seeds), then agent classes collapse with their provenance
// concatenated.
inline Network apply_merge(const Network& net, const MergePlan& plan) {
  std::map<std::string, std::string> status_rep;
  for (const auto& c : plan.status_classes)
    for (const auto& m : c.members) {
      if (!net.contains(Status::normalize(m))) throw StalePlanError(m);
      status_rep[m] = c.representative;
    }
  std::map<std::string, std::string> agent_rep;
  for (const auto& c : plan.agent_classes)
    for (const auto& m : c.members) {
      if (!net.find_agent(m)) throw StalePlanError(m);
      agent_rep[m] = c.representative;
    }

  auto rewrite = [&](const Status& s) {
    auto it = status_rep.find(s.text());
    return it == status_rep.end() ? s : Status::normalize(it->second);
  };
  auto rewrite_set = [&](const StatusSet& set) {
    StatusSet out;
    for (const auto& s : set) out.insert(rewrite(s));
    return out;
  };

  std::map<std::string, std::vector<Agent>> groups;
  for (const auto& a : net.agents()) {
    Agent b = a;
    b.add = rewrite_set(a.add);
    b.condition = rewrite_set(a.condition);
    b.del = rewrite_set(a.del);
    for (const auto& s : b.add) b.del.erase(s);
    auto rep_it = agent_rep.find(a.name);
    groups[rep_it == agent_rep.end() ? a.name : rep_it->second].push_back(std::move(b));
  }
  std::vector<Agent> agents;
  for (auto& [target, members] : groups) {
    auto rep = std::find_if(members.begin(), members.end(), [&](const Agent& a) { return a.name == target; });
    Agent merged = std::move(*rep);
    for (auto& m : members)
      if (&m != &*rep) merged.provenance.insert(merged.provenance.end(), m.provenance.begin(), m.provenance.end());
    agents.push_back(std::move(merged));
  }
  std::vector<Status> seeds;
  for (const auto& s : net.seeds()) {
    auto r = rewrite(s);
    if (std::find(seeds.begin(), seeds.end(), r) == seeds.end()) seeds.push_back(r);
  }
  auto result = Network::from_agents(std::move(agents), std::move(seeds), rewrite_set(net.statuses()));
  if (validate_network(result).has_errors())
    throw InvalidAgent("merge produced invalid agents", validate_network(result).messages());
  return result;
}

struct OptimizeOptions {
  SimilarityOptions similarity;
  int max_rounds = 10;
};

struct AuditRecord {
  int round = 0;
  std::string kind;  // "status" | "agent"
  MergeClass merge;
};

struct OptimizeResult {
  Network network;
  int rounds = 0;
  std::vector<AuditRecord> audit;
  std::vector<std::string> warnings;
};

// Alternates status and agent passes until a round merges nothing.
inline OptimizeResult optimize(const Network& net, llm::Backend* backend, const OptimizeOptions& opts = {}) {
  if (opts.max_rounds < 1) throw InvalidConfig("max_rounds must be at least 1");
  OptimizeResult out{net, 0, {}, {}};
  while (true) {
    if (out.rounds == opts.max_rounds) {
      out.warnings.push_back("optimizer stopped after " + std::to_string(opts.max_rounds) + " rounds without a fixpoint");
      break;
    }
    ++out.rounds;
    auto sp = propose_status_merges(out.network, backend, opts.similarity);
    if (!sp.empty()) out.network = apply_merge(out.network, sp);
    auto ap = propose_agent_merges(out.network, backend, opts.similarity);
    if (!ap.empty()) out.network = apply_merge(out.network, ap);
    for (const auto& c : sp.status_classes) out.audit.push_back({out.rounds, "status", c});
    for (const auto& c : ap.agent_classes) out.audit.push_back({out.rounds, "agent", c});
    if (sp.empty() && ap.empty()) break;
  }
  return out;
}

// One JSON object per line: {round, kind, representative, members, justification}.
inline std::string export_audit(const std::vector<AuditRecord>& audit) {
  std::string out;
  for (const auto& r : audit) {
    nlohmann::json j{{"round", r.round},
                     {"kind", r.kind},
                     {"representative", r.merge.representative},
                     {"members", r.merge.members},
                     {"justification", justification_name(r.merge.justification)}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace ananet
