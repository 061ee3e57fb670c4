#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "ananet/error.hpp"
#include "ananet/status.hpp"
#include "ananet/text.hpp"

namespace ananet {

// Where an agent came from: the seed it was generated for, the hop distance
// from that seed, and the completion source ("manual", a fixture digest, or a
// fixed template such as "rule:pick-up").
struct Provenance {
  std::string seed;
  int distance = 0;
  std::string source = "manual";
  bool operator==(const Provenance&) const = default;
};

// Lowercase, single-spaced, article-free agent name.
inline std::string normalize_agent_name(std::string_view raw) {
  auto words = text::strip_articles(text::canonical_words(raw));
  if (words.empty()) throw InvalidAgent("agent name is empty", {"empty name"});
  return text::join(words);
}

// Key under which two names count as the same agent: plurals folded and any
// "(variant N)" disambiguation suffix dropped.
inline std::string agent_name_key(std::string_view name) {
  auto words = text::canonical_words(name);
  if (words.size() >= 2 && words[words.size() - 2] == "(variant" && !words.back().empty() &&
      words.back().back() == ')')
    words.resize(words.size() - 2);
  words = text::strip_articles(std::move(words));
  for (auto& w : words) w = text::singularize(w);
  return text::join(words);
}

// A STRIPS-like operand. Firing it requires `condition`, then removes `del`
// and asserts `add`.
struct Agent {
  std::string name;
  StatusSet add;
  StatusSet condition;
  StatusSet del;
  // First entry is the agent's own origin; merges append the absorbed ones.
  std::vector<Provenance> provenance{Provenance{}};

  static Agent make(std::string_view name, std::initializer_list<std::string_view> add,
                    std::initializer_list<std::string_view> condition, std::initializer_list<std::string_view> del,
                    Provenance prov = {}) {
    Agent a;
    a.name = normalize_agent_name(name);
    a.add = make_status_set(add);
    a.condition = make_status_set(condition);
    a.del = make_status_set(del);
    a.provenance = {std::move(prov)};
    return a;
  }

  // Lists only; names and provenance are ignored.
  bool same_lists(const Agent& o) const { return add == o.add && condition == o.condition && del == o.del; }

  bool operator==(const Agent& o) const { return name == o.name && same_lists(o); }
};

enum class Severity { Warning, Error };

struct Violation {
  Severity severity = Severity::Error;
  std::string code;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has_errors() const {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.severity == Severity::Error; });
  }
  bool contains(std::string_view code) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
  }
  std::vector<std::string> messages() const {
    std::vector<std::string> out;
    for (const auto& v : violations) out.push_back(v.code + ": " + v.detail);
    return out;
  }
};

inline constexpr std::string_view kEmptyAdd = "empty add list";
inline constexpr std::string_view kAddDeleteOverlap = "add/delete overlap";
inline constexpr std::string_view kDeleteNotInCondition = "delete not ⊆ condition";

// Reports every violated agent invariant. `lenient` downgrades them to
// warnings, which is how ingested participant networks are treated.
inline ValidationReport validate_agent(const Agent& agent, bool lenient = false) {
  ValidationReport report;
  const Severity sev = lenient ? Severity::Warning : Severity::Error;
  if (agent.add.empty()) report.violations.push_back({sev, std::string(kEmptyAdd), agent.name});
  for (const auto& s : agent.del) {
    if (agent.add.count(s))
      report.violations.push_back({sev, std::string(kAddDeleteOverlap), agent.name + ": " + s.text()});
    if (!agent.condition.count(s))
      report.violations.push_back({sev, std::string(kDeleteNotInCondition), agent.name + ": " + s.text()});
  }
  return report;
}

}  // namespace ananet
