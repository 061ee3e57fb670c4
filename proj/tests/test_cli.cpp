#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace ananet;
using namespace ananet::testing;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args, bool with_dirs = true) {
  if (with_dirs && args.size() > 0 && args[0] != "fixtures") {
    args.push_back("--fixtures=" + source_path("fixtures"));
    args.push_back("--templates=" + source_path("templates"));
  }
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return source_path("data/" + name); }

class Cli : public ::testing::Test {
protected:
  void SetUp() override { dir = temp_dir("cli"); }
  void TearDown() override { std::filesystem::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
  std::filesystem::path dir;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}, false).code, 2);
  EXPECT_EQ(invoke({"bogus"}, false).code, 2);
  EXPECT_EQ(invoke({"plan", "--network", data("minimal_network.json"), "--frobnicate"}).code, 2);
  auto r = invoke({"gen", "--seeds", "window clean", "--location", "kitchen", "--out", at("x.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("excludes"), std::string::npos);
  EXPECT_EQ(invoke({"plan", "--network", at("missing.json"), "--world", data("world0.json"), "--goal", "window clean"}).code,
            2);
}

TEST_F(Cli, HelpAndVersion) {
  auto h = invoke({"--help"}, false);
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("gen"), std::string::npos);
  auto v = invoke({"--version"}, false);
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(std::string(kVersion)), std::string::npos);
}

TEST_F(Cli, PlanMinimalNetwork) {
  auto r = invoke({"plan", "--network", data("minimal_network.json"), "--world", data("world0.json"), "--goal",
                "window clean", "--seed", "3", "--trace", at("t.jsonl")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("verdict: success"), std::string::npos);
  EXPECT_NE(r.out.find("clean window"), std::string::npos);
  EXPECT_FALSE(io::read_file(at("t.jsonl")).empty());
}

TEST_F(Cli, PlanGoalOutsideNetworkIsDomainError) {
  auto r = invoke({"plan", "--network", data("minimal_network.json"), "--world", data("world0.json"), "--goal",
                "cup on table"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(Cli, GenSeedsDistanceOne) {
  auto r = invoke({"gen", "--seeds", "window clean", "--max-distance", "1", "--out", at("g.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(deserialize(io::read_file(at("g.json"))).agents().size(), 1u);
}

TEST_F(Cli, GenMissingFixtureNamesTemplateAndHints) {
  auto r = invoke({"gen", "--seeds", "moon shiny", "--out", at("g.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("agent_for_status.v1"), std::string::npos);
  EXPECT_NE(r.err.find("hint:"), std::string::npos);
  EXPECT_NE(r.err.find("partial network"), std::string::npos);
}

TEST_F(Cli, MalformedNetworkIsDomainError) {
  io::write_file(at("bad.json"), "{\"format_version\": 1");
  auto r = invoke({"export", "dot", "--network", at("bad.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("$"), std::string::npos);
}

TEST_F(Cli, ExportDotToStdout) {
  auto r = invoke({"export", "dot", "--network", data("minimal_network.json"), "--conflicters"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, export_dot(box_network(), DotOptions{true, std::nullopt}));
}

TEST_F(Cli, ExportCut) {
  auto r = invoke({"export", "cut", "--network", data("kitchen_network.json"), "--from", "window clean",
                "--max-distance", "5", "--out", at("cut.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  auto full = deserialize(io::read_file(data("kitchen_network.json")));
  auto cut = deserialize(io::read_file(at("cut.json")));
  EXPECT_EQ(cut, subnetwork_within(full, Status::normalize("window clean"), 5));
  EXPECT_LT(cut.agents().size(), full.agents().size());
}

TEST_F(Cli, OptimizeIsIdentityOnShippedNetwork) {
  auto r = invoke({"optimize", "--network", data("minimal_network.json"), "--out", at("o.json"), "--audit", at("a.jsonl")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(io::read_file(at("o.json")), io::read_file(data("minimal_network.json")));
  EXPECT_TRUE(io::read_file(at("a.jsonl")).empty());
}

TEST_F(Cli, EvalScaleAndCoverage) {
  auto s = invoke({"eval", "scale", "--networks", "min=" + data("minimal_network.json"), "--world", data("world0.json"),
                "--goal", "window clean", "--trials", "4", "--json", at("s.json")});
  EXPECT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("min\t4\t7\t4\t4\t100.0%"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(io::read_file(at("s.json")))["rows"][0]["successes"], 4);
  EXPECT_EQ(invoke({"eval", "scale", "--networks", data("minimal_network.json"), "--world", data("world0.json"), "--goal",
                 "window clean", "--trials", "0"})
                .code,
            1);

  auto c = invoke({"eval", "coverage", "--reference", data("minimal_network.json"), "--candidate",
                data("kitchen_network.json")});
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("agents\t4\t4\t100.0%"), std::string::npos);
}

TEST_F(Cli, QuietSuppressesSummary) {
  auto r = invoke({"eval", "coverage", "--reference", data("minimal_network.json"), "--candidate",
                data("minimal_network.json"), "--quiet"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, FixturesRehash) {
  auto req = llm::CompletionRequest::make(llm::templates::kAgentForStatus, {{"status", "window clean"}});
  io::write_file(at("misnamed.fixture"), llm::format_fixture({req, "x", "m", "t"}));
  auto r = invoke({"fixtures", "rehash", dir.string()}, false);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("renamed 1"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / (llm::digest(req) + ".fixture")));
}
