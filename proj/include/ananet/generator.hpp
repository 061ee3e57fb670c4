#pragma once

// Status collection and reverse-order network construction.
//
// Statuses are collected from the backend two ways: from objects found at a
// location ("verb + object" actions on them plus "object preposition object"
// spatial facts), and from actions people perform under given conditions.
// Each action phrase becomes a result status by the derivation rule below.
// build_network then grows agents backwards from seed statuses: for every
// status it either reuses an existing achiever, applies a fixed template
// ("pick up X", "move to X", "put down X"), or asks the backend for an agent
// whose add list contains the status, and recurses into its conditions.

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ananet/agent.hpp"
#include "ananet/error.hpp"
#include "ananet/llm/backend.hpp"
#include "ananet/llm/parse.hpp"
#include "ananet/network.hpp"
#include "ananet/text.hpp"

namespace ananet {

struct CollectionContext {
  std::string location;
  std::vector<std::string> persons;
  std::vector<std::string> time_frames;
  int object_budget = 10;
  int sentence_budget = 5;
  int retry_limit = 2;

  void validate() const {
    if (object_budget < 1 || sentence_budget < 1) throw InvalidConfig("collection budgets must be at least 1");
    if (retry_limit < 0) throw InvalidConfig("retry limit must be non-negative");
  }
};

struct GenerationConfig {
  int max_distance = 6;
  int max_agents = 1000;
  int retry_limit = 2;
  // Statuses taken as already true: never expanded. Passing the initial
  // world yields the minimal network for the seeds.
  StatusSet assumed_world;

  void validate() const {
    if (max_distance < 1) throw InvalidConfig("max_distance must be at least 1");
    if (max_agents < 1) throw InvalidConfig("max_agents must be at least 1");
    if (retry_limit < 0) throw InvalidConfig("retry limit must be non-negative");
  }
};

namespace detail {

inline constexpr auto kSubjects = std::to_array<std::string_view>({"i", "you", "he", "she", "we", "they", "person",
                                      "someone", "people", "to"});

inline constexpr auto kPhraseBoundaries = std::to_array<std::string_view>({"with", "using", "in",   "on",     "at",     "into",   "onto",    "from",  "to",
    "for",                    "by",    "under", "near",  "behind", "beside", "over",    "through", "after",
    "before",                 "during", "while", "inside", "outside", "next", "and",   "then"});

template <class A>
bool in(const A& arr, std::string_view w) {
  return std::find(arr.begin(), arr.end(), w) != arr.end();
}

}  // namespace detail

// "verb + object" -> "object <participle>" ("clean window" -> "window clean",
// "drink water" -> "water drunk"); objectless verbs -> "person <verb>ing"
// ("sleep" -> "person sleeping"). Subjects, articles and trailing
// prepositional phrases are dropped. Returns nullopt for empty input.
inline std::optional<Status> derive_status(std::string_view action) {
  auto words = text::strip_articles(text::canonical_words(action));
  std::size_t i = 0;
  while (i < words.size() && detail::in(detail::kSubjects, words[i])) ++i;
  if (i >= words.size()) return std::nullopt;
  const std::string verb = words[i++];
  std::string particle;
  if (i < words.size() && text::is_particle(words[i])) particle = words[i++];
  std::vector<std::string> object;
  while (i < words.size() && !detail::in(detail::kPhraseBoundaries, words[i])) object.push_back(words[i++]);
  std::string result;
  if (object.empty()) {
    result = "person " + text::gerund(verb) + (particle.empty() ? "" : " " + particle);
  } else {
    result = text::join(object) + " " + text::participle(verb) + (particle.empty() ? "" : " " + particle);
  }
  return Status::normalize(result);
}

inline std::string normalize_object(std::string_view raw) {
  auto words = text::strip_articles(text::canonical_words(raw));
  if (words.empty()) return {};
  words.back() = text::singularize(words.back());
  return text::join(words);
}

namespace detail {

template <class Parse>
auto ask(llm::Backend& backend, std::string_view template_id, std::vector<std::pair<std::string, std::string>> params,
         int retry_limit, Parse parse) -> decltype(parse(std::string_view{})) {
  std::string last;
  for (int attempt = 0; attempt <= retry_limit; ++attempt) {
    auto p = params;
    if (attempt > 0) p.emplace_back("attempt", std::to_string(attempt));
    last = backend.complete(llm::CompletionRequest::make(template_id, std::move(p)));
    try {
      return parse(last);
    } catch (const ShapeError&) {
      if (attempt == retry_limit) break;
    }
  }
  throw ParseError("completion for '" + std::string(template_id) + "' stayed malformed after " +
                       std::to_string(retry_limit) + " retries",
                   last);
}

inline void push_unique(std::vector<Status>& out, std::set<std::string>& seen, const Status& s) {
  if (seen.insert(s.text()).second) out.push_back(s);
}

}  // namespace detail

// Objects at the location, actions on each object, and spatial facts between
// them. Deduplicated, in first-seen order.
inline std::vector<Status> collect_statuses_object_based(const CollectionContext& ctx, llm::Backend& backend) {
  ctx.validate();
  if (text::trim(ctx.location).empty()) throw InvalidConfig("object-based collection needs a location");
  namespace t = llm::templates;
  const auto raw_objects =
      detail::ask(backend, t::kObjectsAtLocation,
                  {{"location", ctx.location}, {"budget", std::to_string(ctx.object_budget)}}, ctx.retry_limit,
                  [](std::string_view s) { return llm::parse_object_list(s); });
  std::vector<std::string> objects;
  for (const auto& o : raw_objects) {
    auto obj = normalize_object(o);
    if (!obj.empty() && std::find(objects.begin(), objects.end(), obj) == objects.end()) objects.push_back(obj);
    if (static_cast<int>(objects.size()) >= ctx.object_budget) break;
  }

  std::vector<Status> out;
  std::set<std::string> seen;
  for (const auto& obj : objects) {
    auto actions = detail::ask(
        backend, t::kObjectActions,
        {{"location", ctx.location}, {"object", obj}, {"budget", std::to_string(ctx.sentence_budget)}},
        ctx.retry_limit, [](std::string_view s) { return llm::parse_sentence_list(s); });
    if (static_cast<int>(actions.size()) > ctx.sentence_budget) actions.resize(static_cast<std::size_t>(ctx.sentence_budget));
    for (const auto& a : actions)
      if (auto s = derive_status(a)) detail::push_unique(out, seen, *s);
  }
  if (!objects.empty()) {
    auto facts = detail::ask(backend, t::kSpatialFacts, {{"location", ctx.location}, {"objects", text::join(objects, ", ")}},
                             ctx.retry_limit, [](std::string_view s) { return llm::parse_sentence_list(s); });
    for (const auto& f : facts) {
      if (text::canonical_words(f).empty()) continue;
      detail::push_unique(out, seen, Status::normalize(f));
    }
  }
  return out;
}

// Actions for every (person, time frame) pair at the context location.
inline std::vector<Status> collect_statuses_condition_based(const CollectionContext& ctx, llm::Backend& backend) {
  ctx.validate();
  if (ctx.persons.empty() || ctx.time_frames.empty())
    throw InvalidConfig("condition-based collection needs at least one person and one time frame");
  std::vector<Status> out;
  std::set<std::string> seen;
  for (const auto& person : ctx.persons) {
    for (const auto& frame : ctx.time_frames) {
      auto actions = detail::ask(backend, llm::templates::kConditionActions,
                                 {{"person", person},
                                  {"location", ctx.location},
                                  {"time_frame", frame},
                                  {"budget", std::to_string(ctx.sentence_budget)}},
                                 ctx.retry_limit, [](std::string_view s) { return llm::parse_sentence_list(s); });
      if (static_cast<int>(actions.size()) > ctx.sentence_budget) actions.resize(static_cast<std::size_t>(ctx.sentence_budget));
      for (const auto& a : actions)
        if (auto s = derive_status(a)) detail::push_unique(out, seen, *s);
    }
  }
  return out;
}

// Deduplicated union: object-based first, then condition-based (skipped when
// no persons or time frames are given).
inline std::vector<Status> collect_seed_statuses(const CollectionContext& ctx, llm::Backend& backend) {
  std::vector<Status> out;
  std::set<std::string> seen;
  for (const auto& s : collect_statuses_object_based(ctx, backend)) detail::push_unique(out, seen, s);
  if (!ctx.persons.empty() && !ctx.time_frames.empty())
    for (const auto& s : collect_statuses_condition_based(ctx, backend)) detail::push_unique(out, seen, s);
  return out;
}

namespace rules {

inline constexpr std::string_view kPickUp = "rule:pick-up";
inline constexpr std::string_view kMoveTo = "rule:move-to";
inline constexpr std::string_view kPutDown = "rule:put-down";

inline Agent pick_up(const std::string& object) {
  return Agent::make("pick up " + object, {object + " in hand"}, {"hand empty", object + " near body"},
                     {"hand empty"}, Provenance{"", 0, std::string(kPickUp)});
}

inline Agent move_to(const std::string& object) {
  return Agent::make("move to " + object, {object + " near body"}, {object + " far from body"},
                     {object + " far from body"}, Provenance{"", 0, std::string(kMoveTo)});
}

inline Agent put_down(const std::string& object) {
  return Agent::make("put down " + object, {"hand empty"}, {object + " in hand"}, {object + " in hand"},
                     Provenance{"", 0, std::string(kPutDown)});
}

inline bool is_hand_empty(const Status& s) { return s.text() == "hand empty"; }

// True for statuses that a fixed template handles.
inline bool matches(const Status& s) {
  if (is_hand_empty(s) || std::holds_alternative<shape::Possession>(s.shape())) return true;
  const auto* prox = std::get_if<shape::Proximity>(&s.shape());
  return prox && prox->near;
}

}  // namespace rules

// Fixed agents for the terminating patterns, without any backend call:
//   "X in hand"   -> pick up X
//   "X near body" -> move to X
//   "hand empty"  -> put down X, one per object in `held_objects`
// Anything else yields no agent.
inline std::vector<Agent> apply_termination_rule(const Status& status,
                                                 const std::vector<std::string>& held_objects = {}) {
  if (rules::is_hand_empty(status)) {
    std::vector<Agent> out;
    for (const auto& obj : held_objects) out.push_back(rules::put_down(obj));
    return out;
  }
  if (const auto* p = std::get_if<shape::Possession>(&status.shape())) return {rules::pick_up(p->object)};
  if (const auto* p = std::get_if<shape::Proximity>(&status.shape()); p && p->near) return {rules::move_to(p->object)};
  return {};
}

namespace detail {

inline Agent agent_from_block(const llm::ParsedAgent& block) {
  Agent a;
  a.name = normalize_agent_name(block.name);
  const std::pair<const std::vector<std::string>*, StatusSet*> lists[] = {
      {&block.add, &a.add}, {&block.condition, &a.condition}, {&block.del, &a.del}};
  for (auto [src, dst] : lists)
    for (const auto& s : *src)
      if (!text::canonical_words(s).empty()) dst->insert(Status::normalize(s));
  return a;
}

}  // namespace detail

// Asks the backend for an agent whose add list contains `status`. Malformed or
// invalid answers are retried with a corrective prompt up to `retry_limit`
// times.
inline Agent generate_agent_for_status(const Status& status, llm::Backend& backend, int retry_limit = 2) {
  namespace t = llm::templates;
  std::string completion, problem;
  std::vector<std::string> violations;
  bool parse_failure = false;
  for (int attempt = 0; attempt <= retry_limit; ++attempt) {
    auto req = attempt == 0 ? llm::CompletionRequest::make(t::kAgentForStatus, {{"status", status.text()}})
                            : llm::CompletionRequest::make(t::kAgentForStatusRetry, {{"status", status.text()},
                                                                                     {"attempt", std::to_string(attempt)},
                                                                                     {"previous", completion},
                                                                                     {"problem", problem}});
    completion = backend.complete(req);
    std::vector<llm::ParsedAgent> blocks;
    try {
      blocks = llm::parse_agent_blocks(completion);
      parse_failure = false;
    } catch (const ShapeError& e) {
      parse_failure = true;
      problem = e.what();
      continue;
    } catch (const InvalidAgent& e) {
      parse_failure = true;
      problem = e.what();
      continue;
    }
    std::optional<Agent> candidate;
    for (const auto& b : blocks) {
      try {
        auto a = detail::agent_from_block(b);
        if (a.add.count(status)) {
          candidate = std::move(a);
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!candidate) {
      problem = "the add list must contain \"" + status.text() + "\"";
      violations = {problem};
      continue;
    }
    auto report = validate_agent(*candidate);
    if (report.has_errors()) {
      violations = report.messages();
      problem = text::join(violations, "; ");
      continue;
    }
    candidate->provenance = {Provenance{"", 0, "llm:" + llm::digest(req)}};
    return *candidate;
  }
  if (parse_failure)
    throw ParseError("no parsable agent for '" + status.text() + "' after " + std::to_string(retry_limit) + " retries",
                     completion);
  throw InvalidAgent("no valid agent for '" + status.text() + "' after " + std::to_string(retry_limit) + " retries",
                     violations);
}

struct BuildResult {
  Network network;
  bool cap_reached = false;
  std::vector<std::string> warnings;
};

// A backend failure during build_network; carries the network built so far so
// the run can be resumed.
class GenerationFailed : public Error {
public:
  GenerationFailed(const std::string& cause, Network partial)
      : Error("network generation stopped: " + cause, "rerun with --resume on the partial network"),
        partial_(std::move(partial)) {}
  const Network& partial() const noexcept { return partial_; }

private:
  Network partial_;
};

namespace detail {

class NetworkBuilder {
public:
  NetworkBuilder(const std::vector<Status>& seeds, const GenerationConfig& cfg, llm::Backend& backend,
                 const Network* resume)
      : cfg_(cfg), backend_(backend) {
    for (const auto& s : seeds)
      if (std::find(seeds_.begin(), seeds_.end(), s) == seeds_.end()) seeds_.push_back(s);
    if (resume)
      for (const auto& a : resume->agents()) preloaded_.push_back(a);
  }

  BuildResult run() {
    for (const auto& s : seeds_) enqueue(s, 0, s.text());
    while (!frontier_.empty() && !result_.cap_reached) {
      auto item = frontier_.front();
      frontier_.pop_front();
      expand(item);
    }
    for (auto& a : preloaded_) commit_preloaded(std::move(a));
    preloaded_.clear();
    result_.network = snapshot();
    return std::move(result_);
  }

  Network snapshot() const { return Network::from_agents(agents_, seeds_); }

private:
  struct Item {
    Status status;
    int distance;
    std::string seed;
  };

  void enqueue(const Status& s, int distance, const std::string& seed) {
    if (distance > cfg_.max_distance || enqueued_.count(s.text())) return;
    enqueued_.insert(s.text());
    frontier_.push_back(Item{s, distance, seed});
  }

  bool achieved(const Status& s) const {
    return std::any_of(agents_.begin(), agents_.end(), [&](const Agent& a) { return a.add.count(s) != 0; });
  }

  bool has_room() {
    if (static_cast<int>(agents_.size()) < cfg_.max_agents) return true;
    if (!result_.cap_reached)
      result_.warnings.push_back("agent cap of " + std::to_string(cfg_.max_agents) + " reached; network is partial");
    result_.cap_reached = true;
    return false;
  }

  void expand(const Item& item) {
    const Status& s = item.status;
    if (achieved(s) || cfg_.assumed_world.count(s)) return;
    const int agent_distance = item.distance + 1;
    if (agent_distance > cfg_.max_distance) return;

    if (auto it = std::find_if(preloaded_.begin(), preloaded_.end(), [&](const Agent& a) { return a.add.count(s) != 0; });
        it != preloaded_.end()) {
      Agent a = std::move(*it);
      preloaded_.erase(it);
      const bool fixed = !a.provenance.empty() && a.provenance.front().source.rfind("rule:", 0) == 0;
      if (!has_room()) return;
      const auto& committed = commit(std::move(a), agent_distance, item.seed, /*keep_provenance=*/true);
      enqueue_conditions(committed, agent_distance, item.seed, fixed);
      return;
    }

    if (rules::is_hand_empty(s)) {
      hand_empty_distance_ = agent_distance;
      hand_empty_seed_ = item.seed;
      add_put_downs();
      return;
    }
    auto fixed = apply_termination_rule(s);
    if (!fixed.empty()) {
      for (auto& a : fixed) {
        if (!has_room()) return;
        const auto& committed = commit(std::move(a), agent_distance, item.seed);
        enqueue_conditions(committed, agent_distance, item.seed, true);
      }
      return;
    }
    if (!has_room()) return;
    Agent generated;
    try {
      generated = generate_agent_for_status(s, backend_, cfg_.retry_limit);
    } catch (const Error& e) {
      throw GenerationFailed(e.what(), snapshot());
    }
    const auto& committed = commit(std::move(generated), agent_distance, item.seed);
    enqueue_conditions(committed, agent_distance, item.seed, false);
  }

  // Conditions of fixed-template agents are only followed when they match a
  // further template ("towel near body" under "pick up towel").
  void enqueue_conditions(const Agent& a, int agent_distance, const std::string& seed, bool fixed) {
    for (const auto& c : a.condition)
      if (!fixed || rules::matches(c)) enqueue(c, agent_distance + 1, seed);
  }

  const Agent& commit(Agent a, int distance, const std::string& seed, bool keep_provenance = false) {
    if (!keep_provenance) {
      if (a.provenance.empty()) a.provenance.emplace_back();
      a.provenance.front().seed = seed;
      a.provenance.front().distance = distance;
    }
    if (auto existing = std::find_if(agents_.begin(), agents_.end(), [&](const Agent& b) { return b.name == a.name; });
        existing != agents_.end()) {
      if (existing->same_lists(a)) return *existing;
      const std::string base = a.name;
      int k = 2;
      while (std::any_of(agents_.begin(), agents_.end(), [&](const Agent& b) {
        return b.name == base + " (variant " + std::to_string(k) + ")";
      }))
        ++k;
      a.name = base + " (variant " + std::to_string(k) + ")";
      result_.warnings.push_back("renamed colliding agent '" + base + "' to '" + a.name + "'");
    }
    agents_.push_back(std::move(a));
    note_possessions(agents_.back());
    if (hand_empty_distance_) add_put_downs();
    return agents_.back();
  }

  void note_possessions(const Agent& a) {
    for (const auto* list : {&a.add, &a.condition, &a.del})
      for (const auto& s : *list)
        if (const auto* p = std::get_if<shape::Possession>(&s.shape())) held_.insert(p->object);
  }

  // One "put down X" per held object once "hand empty" has been expanded.
  void add_put_downs() {
    for (const auto& obj : std::vector<std::string>(held_.begin(), held_.end())) {
      if (put_down_done_.count(obj)) continue;
      if (!has_room()) return;
      put_down_done_.insert(obj);
      commit(rules::put_down(obj), *hand_empty_distance_, hand_empty_seed_);
    }
  }

  void commit_preloaded(Agent a) {
    if (std::any_of(agents_.begin(), agents_.end(), [&](const Agent& b) { return b.name == a.name; })) return;
    agents_.push_back(std::move(a));
  }

  const GenerationConfig& cfg_;
  llm::Backend& backend_;
  std::vector<Status> seeds_;
  std::vector<Agent> agents_;
  std::vector<Agent> preloaded_;
  std::deque<Item> frontier_;
  std::set<std::string> enqueued_;
  std::set<std::string> held_;
  std::set<std::string> put_down_done_;
  std::optional<int> hand_empty_distance_;
  std::string hand_empty_seed_;
  BuildResult result_;
};

}  // namespace detail

// Reverse-order construction from `seeds`, FIFO over statuses. Statuses past
// config.max_distance are not expanded; the build stops early (cap_reached)
// at config.max_agents. `resume` supplies agents from an earlier partial run;
// they are reused instead of querying the backend.
inline BuildResult build_network(const std::vector<Status>& seeds, const GenerationConfig& config,
                                 llm::Backend& backend, const Network* resume = nullptr) {
  config.validate();
  if (seeds.empty()) throw InvalidConfig("build_network needs at least one seed status");
  return detail::NetworkBuilder(seeds, config, backend, resume).run();
}

}  // namespace ananet
