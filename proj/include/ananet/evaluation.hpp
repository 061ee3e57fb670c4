#pragma once

// Coverage of a reference network by a candidate, and planning success rates
// over networks of different sizes.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ananet/document.hpp"
#include "ananet/error.hpp"
#include "ananet/llm/backend.hpp"
#include "ananet/llm/parse.hpp"
#include "ananet/network.hpp"
#include "ananet/planner.hpp"

namespace ananet {

// "72.4%"
inline std::string format_percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", ratio * 100.0);
  return buf;
}

struct CoverageReport {
  std::size_t common_agents = 0;
  std::size_t common_statuses = 0;
  std::size_t reference_agents = 0;
  std::size_t reference_statuses = 0;
  double agent_coverage = 0.0;
  double status_coverage = 0.0;
  std::vector<std::string> unmatched_agents;    // reference names
  std::vector<std::string> unmatched_statuses;  // reference texts
};

// An empty reference axis counts as fully covered.
inline double coverage_ratio(std::size_t common, std::size_t reference) {
  return reference == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(reference);
}

// Statuses match on canonical text, agents on name key (articles, plurals and
// variant suffixes folded). With a backend, the reference items left over are
// then compared against every candidate item by yes/no prompts.
inline CoverageReport coverage_rate(const Network& reference, const Network& candidate, llm::Backend* assist = nullptr) {
  CoverageReport r;
  r.reference_agents = reference.agents().size();
  r.reference_statuses = reference.statuses().size();

  for (const auto& s : reference.statuses()) {
    bool hit = candidate.contains(s);
    if (!hit && assist) {
      for (const auto& c : candidate.statuses()) {
        if (llm::parse_yes_no(assist->complete(llm::CompletionRequest::make(
                llm::templates::kStatusSimilarity, {{"a", s.text()}, {"b", c.text()}})))) {
          hit = true;
          break;
        }
      }
    }
    if (hit) ++r.common_statuses;
    else r.unmatched_statuses.push_back(s.text());
  }

  std::set<std::string> keys;
  for (const auto& a : candidate.agents()) keys.insert(agent_name_key(a.name));
  for (const auto& a : reference.agents()) {
    bool hit = keys.count(agent_name_key(a.name)) != 0;
    if (!hit && assist) {
      for (const auto& c : candidate.agents()) {
        if (llm::parse_yes_no(assist->complete(
                llm::CompletionRequest::make(llm::templates::kAgentSimilarity, {{"a", a.name}, {"b", c.name}})))) {
          hit = true;
          break;
        }
      }
    }
    if (hit) ++r.common_agents;
    else r.unmatched_agents.push_back(a.name);
  }
  r.agent_coverage = coverage_ratio(r.common_agents, r.reference_agents);
  r.status_coverage = coverage_ratio(r.common_statuses, r.reference_statuses);
  return r;
}

inline std::string coverage_tsv(const CoverageReport& r) {
  std::string out = "axis\tcommon\treference\tcoverage\n";
  out += "agents\t" + std::to_string(r.common_agents) + "\t" + std::to_string(r.reference_agents) + "\t" +
         format_percent(r.agent_coverage) + "\n";
  out += "statuses\t" + std::to_string(r.common_statuses) + "\t" + std::to_string(r.reference_statuses) + "\t" +
         format_percent(r.status_coverage) + "\n";
  return out;
}

inline nlohmann::json to_json(const CoverageReport& r) {
  return {{"common_agents", r.common_agents},         {"common_statuses", r.common_statuses},
          {"reference_agents", r.reference_agents},   {"reference_statuses", r.reference_statuses},
          {"agent_coverage", r.agent_coverage},       {"status_coverage", r.status_coverage},
          {"unmatched_agents", r.unmatched_agents},   {"unmatched_statuses", r.unmatched_statuses}};
}

struct TrialFailure {
  std::uint64_t seed = 0;
  std::string reason;
};

struct ScaleRow {
  std::string label;
  std::size_t agents = 0;
  std::size_t statuses = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  std::vector<TrialFailure> failures;  // sorted by seed
};

struct ScaleReport {
  std::vector<ScaleRow> rows;
};

struct LabeledNetwork {
  std::string label;
  Network network;
};

struct TrialOutcome {
  bool success = false;
  std::size_t steps = 0;
  std::string reason;
};

// Runs plan_execute for seeds seed0 .. seed0+trials-1 on every network.
// Trials run on up to `jobs` threads; results are aggregated in seed order,
// so the report does not depend on scheduling.
inline ScaleReport scale_experiment(const std::vector<LabeledNetwork>& networks, const WorldState& world0,
                                    const StatusSet& goals, const PlannerParams& params, int trials,
                                    std::uint64_t seed0, unsigned jobs = 1) {
  if (trials < 1) throw InvalidTrials();
  params.validate();
  const std::size_t per = static_cast<std::size_t>(trials);
  std::vector<TrialOutcome> outcomes(networks.size() * per);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < outcomes.size(); i = next++) {
      const auto& net = networks[i / per].network;
      PlannerParams p = params;
      p.seed = seed0 + i % per;
      auto& out = outcomes[i];
      try {
        const auto trace = plan_execute(net, world0, goals, p);
        out.steps = trace.steps.size();
        out.success = trace.verdict == Verdict::Success;
        if (!out.success) out.reason = verdict_name(trace.verdict);
      } catch (const Error& e) {
        out.reason = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(outcomes.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ScaleReport report;
  for (std::size_t k = 0; k < networks.size(); ++k) {
    ScaleRow row;
    row.label = networks[k].label;
    row.agents = networks[k].network.agents().size();
    row.statuses = networks[k].network.statuses().size();
    row.trials = trials;
    std::size_t steps = 0;
    for (std::size_t t = 0; t < per; ++t) {
      const auto& o = outcomes[k * per + t];
      steps += o.steps;
      if (o.success) ++row.successes;
      else row.failures.push_back({seed0 + t, o.reason});
    }
    row.success_rate = static_cast<double>(row.successes) / static_cast<double>(trials);
    row.mean_steps = static_cast<double>(steps) / static_cast<double>(trials);
    report.rows.push_back(std::move(row));
  }
  return report;
}

inline std::string scale_tsv(const ScaleReport& r) {
  std::string out = "network\tagents\tstatuses\ttrials\tsuccesses\tsuccess_rate\tmean_steps\n";
  char buf[64];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "\t%.2f", row.mean_steps);
    out += row.label + "\t" + std::to_string(row.agents) + "\t" + std::to_string(row.statuses) + "\t" +
           std::to_string(row.trials) + "\t" + std::to_string(row.successes) + "\t" + format_percent(row.success_rate) +
           buf + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const ScaleReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    auto failures = nlohmann::json::array();
    for (const auto& f : row.failures) failures.push_back({{"seed", f.seed}, {"reason", f.reason}});
    rows.push_back({{"network", row.label},
                    {"agents", row.agents},
                    {"statuses", row.statuses},
                    {"trials", row.trials},
                    {"successes", row.successes},
                    {"success_rate", row.success_rate},
                    {"mean_steps", row.mean_steps},
                    {"failures", std::move(failures)}});
  }
  return {{"rows", std::move(rows)}};
}

// Participant networks: schema errors still fail, validation problems come
// back as warnings.
inline LoadedNetwork ingest_reference_network(std::string_view document) { return load_network(document, true); }

}  // namespace ananet
