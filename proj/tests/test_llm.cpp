#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "support.hpp"

using namespace ananet;
using namespace ananet::llm;
using namespace ananet::testing;

namespace {

class FailingTransport : public Transport {
public:
  std::string send(const std::string&, const Decoding&) override {
    ++calls;
    throw TransportError("network disabled in tests");
  }
  std::atomic<int> calls{0};
};

class ScriptedTransport : public Transport {
public:
  std::string send(const std::string& prompt, const Decoding&) override {
    prompts.push_back(prompt);
    if (failures_left > 0) {
      --failures_left;
      throw TransportError("flaky");
    }
    return "reply to " + prompt;
  }
  int failures_left = 0;
  std::vector<std::string> prompts;
};

class SlowTransport : public Transport {
public:
  std::string send(const std::string&, const Decoding&) override {
    const int now = ++in_flight;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight;
    return "ok";
  }
  std::atomic<int> in_flight{0}, peak{0};
};

std::uint64_t independent_fnv(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

CompletionRequest window_request() { return CompletionRequest::make(templates::kAgentForStatus, {{"status", "window clean"}}); }

}  // namespace

TEST(Digest, MatchesIndependentCanonicalHash) {
  const std::string canon =
      "ananet-request-v1\ntemplate:agent_for_status.v1\nparam:status=window clean\ntemperature:0\nmax_tokens:512\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(independent_fnv(canon)));
  EXPECT_EQ(digest(window_request()), buf);
}

TEST(Digest, PinnedGoldens) {
  EXPECT_EQ(digest(window_request()), "0aa5d518caf687e1");
  EXPECT_EQ(digest(CompletionRequest::make(templates::kObjectsAtLocation, {{"location", "kitchen"}, {"budget", "10"}})),
            "01d74939b25b96c9");
}

TEST(Digest, SensitiveToOrderValuesAndDecoding) {
  auto a = CompletionRequest::make(templates::kStatusSimilarity, {{"a", "x"}, {"b", "y"}});
  auto b = CompletionRequest::make(templates::kStatusSimilarity, {{"b", "y"}, {"a", "x"}});
  auto c = a;
  c.decoding.temperature = 0.7;
  auto d = CompletionRequest::make(templates::kStatusSimilarity, {{"a", "x\ny"}, {"b", "y"}});
  std::set<std::string> all{digest(a), digest(b), digest(c), digest(d)};
  EXPECT_EQ(all.size(), 4u);
  EXPECT_EQ(digest(a), digest(CompletionRequest::make(templates::kStatusSimilarity, {{"a", "x"}, {"b", "y"}})));
}

TEST(Request, UnknownTemplate) {
  EXPECT_THROW(CompletionRequest::make("nonsense.v1", {}), UnknownTemplate);
}

TEST(Fixture, FormatParseRoundTrip) {
  FixtureEntry e{CompletionRequest::make(templates::kAgentForStatusRetry,
                                         {{"status", "window clean"}, {"previous", "line one\nline \\two"}}),
                 "Agent: wipe\nAdd list: window clean\n", "m", "2026-01-01T00:00:00Z"};
  auto back = parse_fixture(format_fixture(e), "mem");
  EXPECT_EQ(back.request, e.request);
  EXPECT_EQ(back.completion, e.completion);
  EXPECT_EQ(back.model, "m");
  EXPECT_THROW(parse_fixture("template: x\n", "mem"), Error);
}

TEST(Replay, KnownDigestReturnsRecordedTextExactly) {
  auto dir = temp_dir("replay");
  FixtureStore store(dir);
  store.append({window_request(), "Agent: clean window\r\nAdd list: window clean  \n", "m", "t"});
  ReplayBackend replay(std::make_shared<FixtureStore>(dir));
  EXPECT_EQ(replay.complete(window_request()), "Agent: clean window\r\nAdd list: window clean  \n");
  std::filesystem::remove_all(dir);
}

TEST(Replay, MissNamesTemplate) {
  ReplayBackend replay(std::make_shared<FixtureStore>(temp_dir("empty")));
  try {
    replay.complete(window_request());
    FAIL();
  } catch (const FixtureMiss& e) {
    EXPECT_EQ(e.template_id(), "agent_for_status.v1");
    EXPECT_EQ(e.digest(), digest(window_request()));
    EXPECT_NE(std::string(e.what()).find("agent_for_status.v1"), std::string::npos);
  }
}

TEST(Replay, NeverTouchesTransport) {
  auto transport = std::make_shared<FailingTransport>();
  BackendConfig cfg;
  cfg.mode = Mode::Replay;
  cfg.fixture_dir = source_path("fixtures");
  auto backend = make_backend(cfg, transport);
  EXPECT_NO_THROW(backend->complete(window_request()));
  EXPECT_THROW(backend->complete(CompletionRequest::make(templates::kAgentForStatus, {{"status", "moon clean"}})),
               FixtureMiss);
  EXPECT_EQ(transport->calls.load(), 0);
}

TEST(Record, ThenReplayGivesSameText) {
  auto dir = temp_dir("record");
  auto transport = std::make_shared<ScriptedTransport>();
  BackendConfig cfg;
  cfg.mode = Mode::Record;
  cfg.fixture_dir = dir;
  cfg.template_dir = source_path("templates");
  auto recorder = make_backend(cfg, transport);
  const auto text = recorder->complete(window_request());
  EXPECT_EQ(transport->prompts.size(), 1u);
  EXPECT_NE(transport->prompts.front().find("window clean"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / (digest(window_request()) + ".fixture")));

  cfg.mode = Mode::Replay;
  EXPECT_EQ(make_backend(cfg, nullptr)->complete(window_request()), text);
  std::filesystem::remove_all(dir);
}

TEST(Live, RetriesWithExponentialBackoff) {
  auto transport = std::make_shared<ScriptedTransport>();
  transport->failures_left = 2;
  std::vector<long> slept;
  RetryPolicy policy;
  policy.sleep = [&](std::chrono::milliseconds d) { slept.push_back(d.count()); };
  LiveBackend live(TemplateSet::load(source_path("templates")), transport, policy);
  EXPECT_NO_THROW(live.complete(window_request()));
  EXPECT_EQ(transport->prompts.size(), 3u);
  EXPECT_EQ(slept, (std::vector<long>{1000, 2000}));
}

TEST(Live, GivesUpAfterThreeAttempts) {
  auto transport = std::make_shared<FailingTransport>();
  RetryPolicy policy;
  policy.sleep = [](std::chrono::milliseconds) {};
  LiveBackend live(TemplateSet::load(source_path("templates")), transport, policy);
  EXPECT_THROW(live.complete(window_request()), TransportError);
  EXPECT_EQ(transport->calls.load(), 3);
}

TEST(Live, ConcurrencyCap) {
  auto transport = std::make_shared<SlowTransport>();
  LiveBackend live(TemplateSet::load(source_path("templates")), transport, {}, 2);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { live.complete(window_request()); });
  for (auto& t : threads) t.join();
  EXPECT_LE(transport->peak.load(), 2);
}

TEST(Templates, ShippedSetRendersEveryTemplate) {
  auto set = TemplateSet::load(source_path("templates"));
  std::vector<std::pair<std::string, std::string>> all;
  for (const char* k : {"location", "budget", "object", "objects", "person", "time_frame", "status", "attempt",
                        "previous", "problem", "a", "b"})
    all.emplace_back(k, std::string("<") + k + ">");
  for (auto id : templates::kAll) {
    auto out = set.render(CompletionRequest::make(id, all));
    EXPECT_EQ(out.find('{'), std::string::npos) << id;
    EXPECT_NE(out.find('<'), std::string::npos) << id;
  }
  EXPECT_THROW(set.render(CompletionRequest::make(templates::kObjectActions, {{"location", "kitchen"}})), BackendError);
}

TEST(Store, ShippedFixturesAreNamedByDigest) {
  FixtureStore store(source_path("fixtures"));
  EXPECT_GT(store.size(), 0u);
  EXPECT_TRUE(store.misnamed().empty());
}

TEST(Store, RehashRenamesMisnamedFiles) {
  auto dir = temp_dir("rehash");
  FixtureEntry e{window_request(), "x", "m", "t"};
  io::write_file((dir / "wrong.fixture").string(), format_fixture(e));
  FixtureStore store(dir);
  EXPECT_EQ(store.misnamed().size(), 1u);
  EXPECT_EQ(store.rehash(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / (digest(window_request()) + ".fixture")));
  EXPECT_FALSE(std::filesystem::exists(dir / "wrong.fixture"));
  std::filesystem::remove_all(dir);
}

TEST(Mode, Parse) {
  EXPECT_EQ(parse_mode("record"), Mode::Record);
  EXPECT_THROW(parse_mode("offline"), InvalidConfig);
}

TEST(Parse, PourWaterBlock) {
  auto blocks = parse_agent_blocks(
      "Agent: pour water\nAdd list: water in cup\nCondition list: cup empty, cup in hand\nDelete list: cup empty\n");
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].name, "pour water");
  EXPECT_EQ(blocks[0].add, std::vector<std::string>{"water in cup"});
  EXPECT_EQ(blocks[0].condition, (std::vector<std::string>{"cup empty", "cup in hand"}));
  EXPECT_EQ(blocks[0].del, std::vector<std::string>{"cup empty"});
}

TEST(Parse, DeleteListNone) {
  auto blocks = parse_agent_blocks(
      "- Agent: clean window with towel\n- Add list: window clean\n- Condition list: towel in hand; window near "
      "body\n- Delete list: none\n");
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_TRUE(blocks[0].del.empty());
  EXPECT_EQ(blocks[0].condition.size(), 2u);
}

TEST(Parse, AgentBlockWithoutAddIsShapeError) {
  EXPECT_THROW(parse_agent_blocks("Agent: wipe\nCondition list: none\n"), ShapeError);
  EXPECT_THROW(parse_agent_blocks("I cannot help with that."), ShapeError);
}

TEST(Parse, YesNo) {
  EXPECT_TRUE(parse_yes_no("Yes."));
  EXPECT_FALSE(parse_yes_no("no, they differ"));
  try {
    parse_yes_no("the weather is nice");
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_EQ(e.span(), "the weather is nice");
  }
}

TEST(Parse, ObjectListAcceptsBulletsNumbersAndCommas) {
  EXPECT_EQ(parse_object_list("1. cup\n2) Towel.\n- window, table\n\n"),
            (std::vector<std::string>{"cup", "Towel", "window", "table"}));
  EXPECT_THROW(parse_object_list("this is far too long to be the name of any single object"), ShapeError);
}

TEST(Parse, SentenceListSkipsHeadersAndNone) {
  EXPECT_EQ(parse_sentence_list("Here are some actions:\n1. clean the window.\n2. \"dry the cup\"\nnone\n"),
            (std::vector<std::string>{"clean the window", "dry the cup"}));
  EXPECT_TRUE(parse_sentence_list("").empty());
}

TEST(Parse, StructuredDispatch) {
  EXPECT_TRUE(std::get<bool>(parse_structured("yes", Shape::YesNo)));
  EXPECT_EQ(std::get<std::vector<std::string>>(parse_structured("cup", Shape::ObjectList)).size(), 1u);
}
