#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ananet/ananet.hpp"

namespace ananet::testing {

inline std::string source_path(const std::string& rel) { return std::string(ANANET_SOURCE_DIR) + "/" + rel; }

inline Agent clean_window_with_towel() {
  return Agent::make("clean window with towel", {"window clean"}, {"towel in hand", "window near body"}, {});
}
inline Agent pick_up_towel() {
  return Agent::make("pick up towel", {"towel in hand"}, {"hand empty", "towel near body"}, {"hand empty"});
}
inline Agent move_to(const std::string& obj) {
  return Agent::make("move to " + obj, {obj + " near body"}, {obj + " far from body"}, {obj + " far from body"});
}

// The four-agent window/towel network.
inline Network box_network() {
  return Network::from_agents({clean_window_with_towel(), pick_up_towel(), move_to("towel"), move_to("window")},
                              {Status::normalize("window clean")});
}

inline WorldState world0() { return make_status_set({"hand empty", "towel far from body", "window far from body"}); }

inline StatusSet goal_window_clean() { return make_status_set({"window clean"}); }

// Answers requests from a digest-keyed table; records every request it sees.
class MapBackend : public llm::Backend {
public:
  void add(std::string_view template_id, std::vector<std::pair<std::string, std::string>> params, std::string text) {
    table_[llm::digest(llm::CompletionRequest::make(template_id, std::move(params)))] = std::move(text);
  }
  std::string complete(const llm::CompletionRequest& req) override {
    seen.push_back(req);
    auto it = table_.find(llm::digest(req));
    if (it != table_.end()) return it->second;
    if (fallback) return *fallback;
    throw FixtureMiss(req.template_id, llm::digest(req));
  }
  std::optional<std::string> fallback;
  std::vector<llm::CompletionRequest> seen;

private:
  std::map<std::string, std::string> table_;
};

class FnBackend : public llm::Backend {
public:
  explicit FnBackend(std::function<std::string(const llm::CompletionRequest&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const llm::CompletionRequest& req) override {
    ++calls;
    return fn_(req);
  }
  int calls = 0;

private:
  std::function<std::string(const llm::CompletionRequest&)> fn_;
};

inline std::string param(const llm::CompletionRequest& req, const std::string& key) {
  for (const auto& [k, v] : req.parameters)
    if (k == key) return v;
  return {};
}

// Random valid network over statuses "o<i> p<j>". Agents satisfy every
// invariant; names are "act <k>". With distinct_lists no two agents share all
// three lists.
inline Network random_network(std::mt19937_64& rng, int max_agents, int n_statuses = 8, bool distinct_lists = false) {
  std::uniform_int_distribution<int> n_agents_d(1, max_agents);
  std::uniform_int_distribution<int> status_d(0, n_statuses - 1);
  std::uniform_int_distribution<int> count_d(0, 2);
  auto status = [&](int i) { return Status::normalize("o" + std::to_string(i % 4) + " p" + std::to_string(i)); };
  const int n = n_agents_d(rng);
  std::vector<Agent> agents;
  for (int k = 0; agents.size() < static_cast<std::size_t>(n) && k < 50 * n; ++k) {
    Agent a;
    a.name = "act " + std::to_string(agents.size());
    for (int c = count_d(rng); c > 0; --c) a.condition.insert(status(status_d(rng)));
    for (int c = count_d(rng) + 1; c > 0; --c) {
      auto s = status(status_d(rng));
      if (!a.condition.count(s)) a.add.insert(s);
    }
    if (a.add.empty()) continue;
    for (const auto& s : a.condition)
      if (rng() % 2) a.del.insert(s);
    if (distinct_lists &&
        std::any_of(agents.begin(), agents.end(), [&](const Agent& b) { return b.same_lists(a); }))
      continue;
    agents.push_back(std::move(a));
  }
  StatusSet all;
  for (int i = 0; i < n_statuses; ++i) all.insert(status(i));
  return Network::from_agents(std::move(agents), {status(0)}, all);
}

inline WorldState random_world(std::mt19937_64& rng, const Network& net) {
  WorldState w;
  for (const auto& s : net.statuses())
    if (rng() % 3 == 0) w.insert(s);
  return w;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("ananet-" + tag + "-" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ananet::testing
