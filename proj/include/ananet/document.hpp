#pragma once

// Network and world documents (JSON, "format_version": 1).
//
//   {
//     "format_version": 1,
//     "seed_statuses": ["window clean"],
//     "statuses": ["hand empty", ...],
//     "agents": [{"name": "pick up towel", "add": [...], "condition": [...],
//                 "delete": [...], "provenance": {"seed": ..., "distance": 3,
//                 "source": "rule:pick-up"}}]
//   }
//
// Agents that absorbed others during optimization carry the extra origins in
// an optional "merged_provenance" array. A world document is
// {"format_version": 1, "statuses": [...]}.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ananet/error.hpp"
#include "ananet/network.hpp"

namespace ananet {

inline constexpr int kFormatVersion = 1;

namespace io {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading", "check the path");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing", "check that the directory exists");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace io

namespace detail {

inline nlohmann::json status_array(const StatusSet& set) {
  auto arr = nlohmann::json::array();
  for (const auto& s : set) arr.push_back(s.text());
  return arr;
}

inline nlohmann::json provenance_json(const Provenance& p) {
  return {{"seed", p.seed}, {"distance", p.distance}, {"source", p.source}};
}

inline nlohmann::json parse_json(std::string_view doc) {
  try {
    return nlohmann::json::parse(doc);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing field");
  return *it;
}

inline std::string require_string(const nlohmann::json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

inline Status require_status(const nlohmann::json& v, const std::string& path) {
  try {
    return Status::normalize(require_string(v, path));
  } catch (const EmptyStatus&) {
    throw SchemaError(path, "empty status");
  }
}

inline const nlohmann::json& require_array(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected an array");
  return v;
}

inline Provenance parse_provenance(const nlohmann::json& v, const std::string& path) {
  Provenance p;
  p.seed = require_string(require(v, "seed", path), path + ".seed");
  const auto& d = require(v, "distance", path);
  if (!d.is_number_integer() || d.get<long long>() < 0) throw SchemaError(path + ".distance", "expected integer >= 0");
  p.distance = d.get<int>();
  p.source = require_string(require(v, "source", path), path + ".source");
  return p;
}

inline void check_version(const nlohmann::json& doc) {
  const auto& v = require(doc, "format_version", "$");
  if (!v.is_number_integer() || v.get<long long>() != kFormatVersion)
    throw SchemaError("$.format_version", "unsupported version (expected 1)");
}

}  // namespace detail

inline nlohmann::json to_json(const Network& net) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  auto seeds = nlohmann::json::array();
  for (const auto& s : net.seeds()) seeds.push_back(s.text());
  doc["seed_statuses"] = std::move(seeds);
  doc["statuses"] = detail::status_array(net.statuses());
  auto agents = nlohmann::json::array();
  for (const auto& a : net.agents()) {
    nlohmann::json j;
    j["name"] = a.name;
    j["add"] = detail::status_array(a.add);
    j["condition"] = detail::status_array(a.condition);
    j["delete"] = detail::status_array(a.del);
    j["provenance"] = detail::provenance_json(a.provenance.empty() ? Provenance{} : a.provenance.front());
    if (a.provenance.size() > 1) {
      auto extra = nlohmann::json::array();
      for (std::size_t i = 1; i < a.provenance.size(); ++i) extra.push_back(detail::provenance_json(a.provenance[i]));
      j["merged_provenance"] = std::move(extra);
    }
    agents.push_back(std::move(j));
  }
  doc["agents"] = std::move(agents);
  return doc;
}

inline std::string serialize(const Network& net) { return to_json(net).dump(2) + "\n"; }

struct LoadedNetwork {
  Network network;
  ValidationReport warnings;
};

// Parses a network document. In strict mode any agent invariant violation is
// a SchemaError; lenient mode returns them as warnings.
inline LoadedNetwork load_network(std::string_view document, bool lenient) {
  const auto doc = detail::parse_json(document);
  detail::check_version(doc);

  std::vector<Status> seeds;
  const auto& seed_arr = detail::require_array(doc, "seed_statuses", "$");
  for (std::size_t i = 0; i < seed_arr.size(); ++i)
    seeds.push_back(detail::require_status(seed_arr[i], "$.seed_statuses[" + std::to_string(i) + "]"));

  StatusSet statuses;
  const auto& st_arr = detail::require_array(doc, "statuses", "$");
  for (std::size_t i = 0; i < st_arr.size(); ++i)
    statuses.insert(detail::require_status(st_arr[i], "$.statuses[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (!statuses.count(seeds[i]))
      throw SchemaError("$.seed_statuses[" + std::to_string(i) + "]", "undeclared status '" + seeds[i].text() + "'");

  std::vector<Agent> agents;
  std::set<std::string> names;
  LoadedNetwork out;
  const auto& ag_arr = detail::require_array(doc, "agents", "$");
  for (std::size_t i = 0; i < ag_arr.size(); ++i) {
    const std::string path = "$.agents[" + std::to_string(i) + "]";
    const auto& j = ag_arr[i];
    Agent a;
    try {
      a.name = normalize_agent_name(detail::require_string(detail::require(j, "name", path), path + ".name"));
    } catch (const InvalidAgent&) {
      throw SchemaError(path + ".name", "empty agent name");
    }
    if (!names.insert(a.name).second) throw SchemaError(path + ".name", "duplicate agent name '" + a.name + "'");
    const std::pair<const char*, StatusSet*> lists[] = {{"add", &a.add}, {"condition", &a.condition}, {"delete", &a.del}};
    for (auto [key, set] : lists) {
      const auto& arr = detail::require_array(j, key, path);
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string item_path = path + "." + key + "[" + std::to_string(k) + "]";
        auto s = detail::require_status(arr[k], item_path);
        if (!statuses.count(s)) throw SchemaError(item_path, "undeclared status '" + s.text() + "'");
        set->insert(std::move(s));
      }
    }
    a.provenance.clear();
    if (j.contains("provenance")) {
      a.provenance.push_back(detail::parse_provenance(j["provenance"], path + ".provenance"));
    } else {
      a.provenance.push_back(Provenance{});
    }
    if (j.contains("merged_provenance")) {
      const auto& extra = detail::require_array(j, "merged_provenance", path);
      for (std::size_t k = 0; k < extra.size(); ++k)
        a.provenance.push_back(
            detail::parse_provenance(extra[k], path + ".merged_provenance[" + std::to_string(k) + "]"));
    }
    auto report = validate_agent(a, lenient);
    if (!lenient && report.has_errors()) throw SchemaError(path, report.messages().front());
    out.warnings.violations.insert(out.warnings.violations.end(), report.violations.begin(),
                                   report.violations.end());
    agents.push_back(std::move(a));
  }
  out.network = Network::create(std::move(seeds), std::move(statuses), std::move(agents));
  return out;
}

inline Network deserialize(std::string_view document) { return load_network(document, false).network; }

inline std::string serialize_world(const StatusSet& world) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["statuses"] = detail::status_array(world);
  return doc.dump(2) + "\n";
}

inline StatusSet deserialize_world(std::string_view document) {
  const auto doc = detail::parse_json(document);
  detail::check_version(doc);
  StatusSet world;
  const auto& arr = detail::require_array(doc, "statuses", "$");
  for (std::size_t i = 0; i < arr.size(); ++i)
    world.insert(detail::require_status(arr[i], "$.statuses[" + std::to_string(i) + "]"));
  return world;
}

}  // namespace ananet
