#pragma once

#include <optional>
#include <sstream>
#include <string>

#include "ananet/network.hpp"

namespace ananet {

struct DotOptions {
  bool show_conflicters = false;
  // When set, every node reachable from this seed is labelled with its hop distance.
  std::optional<Status> distance_seed;
};

namespace detail {

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string agent_node(std::string_view name) { return dot_quote("a:" + std::string(name)); }
inline std::string status_node(const Status& s) { return dot_quote("s:" + s.text()); }

}  // namespace detail

// Agents are boxes, statuses ellipses. Condition edges run status -> agent,
// add edges agent -> status, delete edges agent -> status dashed. Node and
// edge order follow the network's lexicographic order.
inline std::string export_dot(const Network& net, const DotOptions& opts = {}) {
  std::optional<DistanceMap> dm;
  if (opts.distance_seed) dm = distance_map(net, *opts.distance_seed);

  auto label = [&](const std::string& text, std::optional<int> d) {
    auto q = detail::dot_quote(text);
    if (d) q.insert(q.size() - 1, "\\n(d=" + std::to_string(*d) + ")");
    return q;
  };

  std::ostringstream out;
  out << "digraph behavior_network {\n";
  out << "  rankdir=LR;\n";
  for (const auto& a : net.agents())
    out << "  " << detail::agent_node(a.name) << " [shape=box, label="
        << label(a.name, dm ? dm->of_agent(a.name) : std::nullopt) << "];\n";
  for (const auto& s : net.statuses())
    out << "  " << detail::status_node(s) << " [shape=ellipse, label="
        << label(s.text(), dm ? dm->of_status(s) : std::nullopt) << "];\n";
  for (const auto& a : net.agents()) {
    const auto node = detail::agent_node(a.name);
    for (const auto& s : a.condition) out << "  " << detail::status_node(s) << " -> " << node << ";\n";
    for (const auto& s : a.add) out << "  " << node << " -> " << detail::status_node(s) << ";\n";
    for (const auto& s : a.del) out << "  " << node << " -> " << detail::status_node(s) << " [style=dashed];\n";
  }
  if (opts.show_conflicters) {
    const auto& links = net.links();
    for (std::size_t a = 0; a < net.agents().size(); ++a)
      for (auto b : links.conflicters[a])
        out << "  " << detail::agent_node(net.agents()[a].name) << " -> " << detail::agent_node(net.agents()[b].name)
            << " [style=dotted, color=red, constraint=false];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace ananet
