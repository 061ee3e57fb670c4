#pragma once

// Command-line front end: gen, optimize, plan, eval, export, fixtures.
// Exit status 0 on success, 1 on domain errors, 2 on usage errors.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ananet/ananet.hpp"
#include "ananet/llm/http_transport.hpp"

namespace ananet::cli {

namespace detail {

struct Common {
  std::uint64_t seed = 0;
  bool quiet = false;
  unsigned jobs = 0;
  std::string backend;
  std::string fixtures;
  std::string templates;
};

inline void add_common(CLI::App* app, Common& c) {
  app->set_version_flag("--version", std::string(kVersion));
  app->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  app->add_flag("--quiet", c.quiet, "Suppress the human summary on standard output");
  app->add_option("--jobs", c.jobs, "Worker threads (default: processors, at most 4)");
  app->add_option("--backend", c.backend, "Completion backend: live, record or replay (default: ANANET_LLM_MODE or replay)");
  app->add_option("--fixtures", c.fixtures, "Fixture directory (default: ANANET_FIXTURE_DIR or ./fixtures)");
  app->add_option("--templates", c.templates, "Prompt template directory (default: ANANET_TEMPLATE_DIR or ./templates)");
}

inline unsigned jobs_of(const Common& c) {
  if (c.jobs > 0) return c.jobs;
  return std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
}

inline std::shared_ptr<llm::Backend> make_backend(const Common& c) {
  auto cfg = llm::BackendConfig::from_env();
  if (!c.backend.empty()) cfg.mode = llm::parse_mode(c.backend);
  if (!c.fixtures.empty()) cfg.fixture_dir = c.fixtures;
  if (!c.templates.empty()) cfg.template_dir = c.templates;
  std::shared_ptr<llm::Transport> transport;
  if (cfg.mode != llm::Mode::Replay) {
    if (cfg.endpoint.empty()) throw InvalidConfig("live and record modes need an endpoint", "set ANANET_LLM_ENDPOINT");
    transport = std::make_shared<llm::HttpTransport>(cfg.endpoint, cfg.api_key, cfg.model);
  }
  return llm::make_backend(cfg, transport);
}

inline Network read_network(const std::string& path) { return deserialize(io::read_file(path)); }

inline StatusSet read_world(const std::string& path) { return deserialize_world(io::read_file(path)); }

inline StatusSet to_status_set(const std::vector<std::string>& texts) {
  StatusSet out;
  for (const auto& t : texts) out.insert(Status::normalize(t));
  return out;
}

inline void add_planner_options(CLI::App* app, PlannerParams& p) {
  app->add_option("--max-steps", p.max_steps, "Step budget per run")->capture_default_str();
  app->add_option("--state-gain", p.state_gain, "Input from true conditions")->capture_default_str();
  app->add_option("--goal-gain", p.goal_gain, "Input from unmet goals")->capture_default_str();
  app->add_option("--protection-gain", p.protection_gain, "Inhibition protecting met goals")->capture_default_str();
  app->add_option("--mean-level", p.mean_level, "Mean activation after normalization")->capture_default_str();
  app->add_option("--threshold", p.initial_threshold, "Initial selection threshold")->capture_default_str();
  app->add_option("--decay", p.threshold_decay, "Threshold factor on a stalled step")->capture_default_str();
}

inline std::string join_lines(const std::vector<std::string>& v, const std::string& prefix) {
  std::string out;
  for (const auto& s : v) out += prefix + s + "\n";
  return out;
}

}  // namespace detail

inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Behavior networks generated from language-model completions", "ananet"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Common common;

  // gen
  auto* gen = app.add_subcommand("gen", "Collect seed statuses and grow a network backwards from them");
  add_common(gen, common);
  std::vector<std::string> seeds, persons, frames, assume;
  std::string location, world_file, resume_file, gen_out;
  GenerationConfig gcfg;
  CollectionContext ctx;
  auto* seeds_opt = gen->add_option("--seeds", seeds, "Seed statuses");
  auto* loc_opt = gen->add_option("--location", location, "Collect seeds from objects and activities at a location");
  seeds_opt->excludes(loc_opt);
  gen->add_option("--person", persons, "Person for condition-based collection")->needs(loc_opt);
  gen->add_option("--time-frame", frames, "Time frame for condition-based collection")->needs(loc_opt);
  gen->add_option("--object-budget", ctx.object_budget, "Objects to list")->capture_default_str();
  gen->add_option("--sentence-budget", ctx.sentence_budget, "Sentences per object or condition")->capture_default_str();
  gen->add_option("--max-distance", gcfg.max_distance, "Distance bound from the seeds")->capture_default_str();
  gen->add_option("--max-agents", gcfg.max_agents, "Agent cap")->capture_default_str();
  gen->add_option("--retry-limit", gcfg.retry_limit, "Retries for malformed completions")->capture_default_str();
  gen->add_option("--world", world_file, "World document whose statuses are taken as given (minimal cut)")
      ->check(CLI::ExistingFile);
  gen->add_option("--assume", assume, "Further statuses taken as given");
  gen->add_option("--resume", resume_file, "Partial network from an interrupted run")->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Output network document")->required();

  // optimize
  auto* opt = app.add_subcommand("optimize", "Merge equivalent statuses and agents");
  add_common(opt, common);
  std::string opt_in, opt_out, opt_audit;
  bool opt_assist = false;
  OptimizeOptions oopts;
  opt->add_option("--network", opt_in, "Input network")->required()->check(CLI::ExistingFile);
  opt->add_option("--out", opt_out, "Output network")->required();
  opt->add_option("--audit", opt_audit, "Merge audit output (one JSON record per line)");
  opt->add_flag("--assist", opt_assist, "Ask the backend about non-identical candidates");
  opt->add_option("--samples", oopts.similarity.samples, "Yes/no samples per pair")->capture_default_str();
  opt->add_option("--max-rounds", oopts.max_rounds, "Round cap")->capture_default_str();

  // plan
  auto* plan = app.add_subcommand("plan", "Run activation-spreading action selection");
  add_common(plan, common);
  std::string plan_net, plan_world, plan_trace;
  std::vector<std::string> plan_goals;
  PlannerParams pparams;
  bool no_reset = false;
  plan->add_option("--network", plan_net, "Network document")->required()->check(CLI::ExistingFile);
  plan->add_option("--world", plan_world, "Initial world document")->required()->check(CLI::ExistingFile);
  plan->add_option("--goal", plan_goals, "Goal statuses")->required();
  plan->add_option("--trace", plan_trace, "Trace output (one JSON record per step)");
  plan->add_flag("--no-reset", no_reset, "Keep the winner's activation after it fires");
  plan->add_flag("--reset-threshold", pparams.reset_threshold, "Restore the initial threshold after each firing");
  add_planner_options(plan, pparams);

  // eval
  auto* eval = app.add_subcommand("eval", "Coverage and scale experiments");
  eval->require_subcommand(1);
  auto* cov = eval->add_subcommand("coverage", "Coverage of a reference network by a candidate");
  add_common(cov, common);
  std::string cov_ref, cov_cand, cov_tsv, cov_json;
  bool cov_assist = false;
  cov->add_option("--reference", cov_ref, "Reference network")->required()->check(CLI::ExistingFile);
  cov->add_option("--candidate", cov_cand, "Candidate network")->required()->check(CLI::ExistingFile);
  cov->add_flag("--assist", cov_assist, "Ask the backend about items without an exact match");
  cov->add_option("--tsv", cov_tsv, "Report table output");
  cov->add_option("--json", cov_json, "Report document output");

  auto* scale = eval->add_subcommand("scale", "Planning success rate per network");
  add_common(scale, common);
  std::vector<std::string> scale_nets, scale_goals;
  std::string scale_world, scale_tsv_out, scale_json_out;
  int trials = 10;
  PlannerParams sparams;
  scale->add_option("--networks", scale_nets, "Network documents, optionally as label=path")->required();
  scale->add_option("--world", scale_world, "Initial world document")->required()->check(CLI::ExistingFile);
  scale->add_option("--goal", scale_goals, "Goal statuses")->required();
  scale->add_option("--trials", trials, "Runs per network, seeds --seed .. --seed+trials-1")->capture_default_str();
  scale->add_option("--tsv", scale_tsv_out, "Report table output");
  scale->add_option("--json", scale_json_out, "Report document output");
  add_planner_options(scale, sparams);

  // export
  auto* exp = app.add_subcommand("export", "Export a network");
  exp->require_subcommand(1);
  auto* dot = exp->add_subcommand("dot", "Graphviz rendering");
  add_common(dot, common);
  std::string dot_in, dot_out, dot_from;
  bool dot_conf = false;
  dot->add_option("--network", dot_in, "Network document")->required()->check(CLI::ExistingFile);
  dot->add_option("--out", dot_out, "Output file (default: standard output)");
  dot->add_flag("--conflicters", dot_conf, "Draw conflicter edges");
  dot->add_option("--distance-from", dot_from, "Label nodes with their distance from this status");

  auto* cut = exp->add_subcommand("cut", "Agents within a distance of a status, closed over their lists");
  add_common(cut, common);
  std::string cut_in, cut_out, cut_from;
  int cut_distance = 6;
  cut->add_option("--network", cut_in, "Network document")->required()->check(CLI::ExistingFile);
  cut->add_option("--out", cut_out, "Output network")->required();
  cut->add_option("--from", cut_from, "Status the distance is measured from")->required();
  cut->add_option("--max-distance", cut_distance, "Largest agent distance kept")->capture_default_str();

  // fixtures
  auto* fix = app.add_subcommand("fixtures", "Fixture maintenance");
  fix->require_subcommand(1);
  auto* rehash = fix->add_subcommand("rehash", "Rename fixture files to the digest of their request");
  add_common(rehash, common);
  std::string rehash_dir;
  rehash->add_option("dir", rehash_dir, "Fixture directory")->required()->check(CLI::ExistingDirectory);

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  auto say = [&](const std::string& s) {
    if (!common.quiet) out << s;
  };

  try {
    if (*gen) {
      gcfg.validate();
      auto backend = make_backend(common);
      for (const auto& s : assume) gcfg.assumed_world.insert(Status::normalize(s));
      if (!world_file.empty())
        for (const auto& s : read_world(world_file)) gcfg.assumed_world.insert(s);
      std::vector<Status> seed_list;
      if (!location.empty()) {
        ctx.location = location;
        ctx.persons = persons;
        ctx.time_frames = frames;
        ctx.retry_limit = gcfg.retry_limit;
        seed_list = collect_seed_statuses(ctx, *backend);
      } else {
        for (const auto& s : seeds) seed_list.push_back(Status::normalize(s));
      }
      if (seed_list.empty()) throw InvalidConfig("no seed statuses", "pass --seeds or a --location with fixtures");
      std::optional<Network> resume;
      if (!resume_file.empty()) resume = read_network(resume_file);
      BuildResult result;
      try {
        result = build_network(seed_list, gcfg, *backend, resume ? &*resume : nullptr);
      } catch (const GenerationFailed& e) {
        io::write_file(gen_out, serialize(e.partial()));
        err << "error: " << e.what() << "\n";
        err << "partial network (" << e.partial().agents().size() << " agents) written to " << gen_out << "\n";
        err << "hint: " << e.hint() << "\n";
        return 1;
      }
      io::write_file(gen_out, serialize(result.network));
      for (const auto& w : result.warnings) err << "warning: " << w << "\n";
      say("generated " + std::to_string(result.network.agents().size()) + " agents, " +
          std::to_string(result.network.statuses().size()) + " statuses -> " + gen_out + "\n");
      if (result.cap_reached) {
        err << "hint: raise --max-agents and rerun with --resume " << gen_out << "\n";
        return 1;
      }
      return 0;
    }

    if (*opt) {
      auto net = read_network(opt_in);
      std::shared_ptr<llm::Backend> backend;
      if (opt_assist) backend = make_backend(common);
      auto result = optimize(net, backend.get(), oopts);
      io::write_file(opt_out, serialize(result.network));
      if (!opt_audit.empty()) io::write_file(opt_audit, export_audit(result.audit));
      for (const auto& w : result.warnings) err << "warning: " << w << "\n";
      say("optimized in " + std::to_string(result.rounds) + " round(s): agents " + std::to_string(net.agents().size()) +
          " -> " + std::to_string(result.network.agents().size()) + ", statuses " +
          std::to_string(net.statuses().size()) + " -> " + std::to_string(result.network.statuses().size()) + "\n");
      return 0;
    }

    if (*plan) {
      pparams.seed = common.seed;
      pparams.reset_winner = !no_reset;
      auto net = read_network(plan_net);
      auto world = read_world(plan_world);
      auto trace = plan_execute(net, world, to_status_set(plan_goals), pparams);
      if (!plan_trace.empty()) io::write_file(plan_trace, export_trace(trace));
      say(std::string("verdict: ") + verdict_name(trace.verdict) + "\nsteps: " + std::to_string(trace.steps.size()) +
          "\nplan:\n" + join_lines(trace.executed(), "  "));
      return 0;
    }

    if (*cov) {
      auto ref = ingest_reference_network(io::read_file(cov_ref));
      for (const auto& m : ref.warnings.messages()) err << "warning: reference: " << m << "\n";
      auto cand = load_network(io::read_file(cov_cand), true).network;
      std::shared_ptr<llm::Backend> backend;
      if (cov_assist) backend = make_backend(common);
      auto report = coverage_rate(ref.network, cand, backend.get());
      const auto table = coverage_tsv(report);
      if (!cov_tsv.empty()) io::write_file(cov_tsv, table);
      if (!cov_json.empty()) io::write_file(cov_json, to_json(report).dump(2) + "\n");
      say(table);
      return 0;
    }

    if (*scale) {
      std::vector<LabeledNetwork> nets;
      for (const auto& spec : scale_nets) {
        const auto eq = spec.find('=');
        std::string label = eq == std::string::npos ? std::filesystem::path(spec).stem().string() : spec.substr(0, eq);
        std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        if (!std::filesystem::exists(path)) throw CLI::ValidationError("--networks", "no such file: " + path);
        nets.push_back({label, read_network(path)});
      }
      auto report = scale_experiment(nets, read_world(scale_world), to_status_set(scale_goals), sparams, trials,
                                     common.seed, jobs_of(common));
      const auto table = scale_tsv(report);
      if (!scale_tsv_out.empty()) io::write_file(scale_tsv_out, table);
      if (!scale_json_out.empty()) io::write_file(scale_json_out, to_json(report).dump(2) + "\n");
      say(table);
      return 0;
    }

    if (*dot) {
      auto net = read_network(dot_in);
      DotOptions dopts;
      dopts.show_conflicters = dot_conf;
      if (!dot_from.empty()) dopts.distance_seed = Status::normalize(dot_from);
      const auto text = export_dot(net, dopts);
      if (dot_out.empty()) out << text;
      else io::write_file(dot_out, text);
      return 0;
    }

    if (*cut) {
      auto net = subnetwork_within(read_network(cut_in), Status::normalize(cut_from), cut_distance);
      io::write_file(cut_out, serialize(net));
      say("kept " + std::to_string(net.agents().size()) + " agents, " + std::to_string(net.statuses().size()) +
          " statuses -> " + cut_out + "\n");
      return 0;
    }

    if (*rehash) {
      llm::FixtureStore store(rehash_dir);
      const auto n = store.rehash();
      say("renamed " + std::to_string(n) + " of " + std::to_string(store.size()) + " fixture(s)\n");
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (!e.hint().empty()) err << "hint: " << e.hint() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace ananet::cli
