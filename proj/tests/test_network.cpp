#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ananet;
using namespace ananet::testing;

namespace {

std::size_t id(const Network& n, std::string_view name) { return *n.agent_id(name); }

bool intersects(const StatusSet& a, const StatusSet& b) {
  for (const auto& s : a)
    if (b.count(s)) return true;
  return false;
}

// Pairwise recomputation of the three relations.
void expect_links_match_bruteforce(const Network& net) {
  const auto& agents = net.agents();
  const auto& L = net.links();
  for (std::size_t a = 0; a < agents.size(); ++a) {
    std::vector<std::size_t> succ, pred, conf;
    for (std::size_t b = 0; b < agents.size(); ++b) {
      if (intersects(agents[a].add, agents[b].condition)) succ.push_back(b);
      if (intersects(agents[b].add, agents[a].condition)) pred.push_back(b);
      if (intersects(agents[a].del, agents[b].condition)) conf.push_back(b);
    }
    EXPECT_EQ(L.successors[a], succ);
    EXPECT_EQ(L.predecessors[a], pred);
    EXPECT_EQ(L.conflicters[a], conf);
  }
}

// Relaxation to a fixpoint over every derivation; independent of the BFS.
std::map<std::string, int> bruteforce_distances(const Network& net, const Status& seed) {
  constexpr int inf = 1 << 20;
  std::map<std::string, int> d;
  for (const auto& s : net.statuses()) d["s:" + s.text()] = inf;
  for (const auto& a : net.agents()) d["a:" + a.name] = inf;
  d["s:" + seed.text()] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& a : net.agents()) {
      for (const auto& s : a.add) {
        int via = d["s:" + s.text()] + 1;
        if (via < d["a:" + a.name]) d["a:" + a.name] = via, changed = true;
      }
      for (const auto& c : a.condition) {
        int via = d["a:" + a.name] + 1;
        if (via < d["s:" + c.text()]) d["s:" + c.text()] = via, changed = true;
      }
    }
  }
  for (auto it = d.begin(); it != d.end();) it = it->second >= inf ? d.erase(it) : std::next(it);
  return d;
}

}  // namespace

TEST(Network, BoxNetworkCounts) {
  auto n = box_network();
  EXPECT_EQ(n.agents().size(), 4u);
  EXPECT_EQ(n.statuses().size(), 7u);
  EXPECT_TRUE(validate_network(n).ok());
}

TEST(Network, SuccessorViaTowelNearBody) {
  auto n = box_network();
  const auto& succ = n.links().successors[id(n, "move to towel")];
  EXPECT_NE(std::find(succ.begin(), succ.end(), id(n, "pick up towel")), succ.end());
}

TEST(Network, SuccessorViaTowelInHand) {
  auto n = box_network();
  const auto& succ = n.links().successors[id(n, "pick up towel")];
  EXPECT_EQ(succ, std::vector<std::size_t>{id(n, "clean window with towel")});
  const auto& pred = n.links().predecessors[id(n, "clean window with towel")];
  EXPECT_EQ(pred.size(), 2u);
}

TEST(Network, PickUpConflictsWithHandEmptyRequirers) {
  auto n = Network::from_agents({pick_up_towel(), move_to("towel"),
                                 Agent::make("pick up cup", {"cup in hand"}, {"hand empty", "cup near body"},
                                             {"hand empty"})});
  const auto& conf = n.links().conflicters[id(n, "pick up towel")];
  EXPECT_EQ(conf, (std::vector<std::size_t>{id(n, "pick up cup"), id(n, "pick up towel")}));
  expect_links_match_bruteforce(n);
}

TEST(Network, LinksMatchBruteforceOnRandomNetworks) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) expect_links_match_bruteforce(random_network(rng, 10));
}

TEST(Network, RebuildingAfterEditEqualsFreshDerivation) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto net = random_network(rng, 8);
    auto agents = net.agents();
    agents.pop_back();
    auto edited = Network::from_agents(agents, net.seeds(), net.statuses());
    EXPECT_EQ(edited.links(), derive_links(edited.status_list(), edited.agents()));
  }
}

TEST(Network, DanglingStatusRejected) {
  EXPECT_THROW(Network::create({}, make_status_set({"window clean"}), {clean_window_with_towel()}), DanglingStatus);
}

TEST(Network, DuplicateNameRejected) {
  EXPECT_THROW(Network::from_agents({pick_up_towel(), pick_up_towel()}), DuplicateAgent);
}

TEST(Network, UnknownSeedRejected) {
  EXPECT_THROW(Network::create({Status::normalize("x y")}, {}, {}), UnknownSeed);
}

TEST(Distance, BoxNetworkFromWindowClean) {
  auto n = box_network();
  auto dm = distance_map(n, Status::normalize("window clean"));
  EXPECT_EQ(dm.of_status(Status::normalize("window clean")), 0);
  EXPECT_EQ(dm.of_agent("clean window with towel"), 1);
  EXPECT_EQ(dm.of_status(Status::normalize("towel in hand")), 2);
  EXPECT_EQ(dm.of_agent("pick up towel"), 3);
  EXPECT_EQ(dm.of_status(Status::normalize("hand empty")), 4);
  EXPECT_EQ(dm.of_agent("move to window"), 3);
  EXPECT_EQ(dm.of_agent("move to towel"), 5);
  EXPECT_EQ(dm.of_status(Status::normalize("towel far from body")), 6);
}

TEST(Distance, IsolatedSeed) {
  auto n = Network::from_agents({pick_up_towel()}, {Status::normalize("window clean")});
  auto dm = distance_map(n, Status::normalize("window clean"));
  EXPECT_EQ(dm.statuses.size(), 1u);
  EXPECT_TRUE(dm.agents.empty());
}

TEST(Distance, UnknownSeedThrows) {
  EXPECT_THROW(distance_map(box_network(), Status::normalize("cup on table")), UnknownSeed);
}

TEST(Distance, MinimalOnRandomNetworks) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    auto net = random_network(rng, 10);
    const auto seed = net.status_list()[rng() % net.status_list().size()];
    auto dm = distance_map(net, seed);
    std::map<std::string, int> got;
    for (const auto& [k, v] : dm.statuses) got["s:" + k] = v;
    for (const auto& [k, v] : dm.agents) got["a:" + k] = v;
    EXPECT_EQ(got, bruteforce_distances(net, seed));
  }
}

TEST(Distance, SubnetworkWithinKeepsNearAgents) {
  auto n = box_network();
  auto cut = subnetwork_within(n, Status::normalize("window clean"), 3);
  EXPECT_EQ(cut.agents().size(), 3u);
  EXPECT_FALSE(cut.find_agent("move to towel"));
  EXPECT_EQ(subnetwork_within(n, Status::normalize("window clean"), 5).agents().size(), 4u);
}

namespace {
std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}
}  // namespace

TEST(Dot, BoxNetworkShapeAndEdgeCounts) {
  const auto dot = export_dot(box_network());
  EXPECT_EQ(count(dot, "shape=box"), 4u);
  EXPECT_EQ(count(dot, "shape=ellipse"), 7u);
  const auto arrows = count(dot, " -> ");
  const auto dashed = count(dot, "style=dashed");
  // conditions 2+2+1+1, adds 1+1+1+1, deletes 0+1+1+1
  EXPECT_EQ(arrows - dashed, 10u);
  EXPECT_EQ(dashed, 3u);
}

TEST(Dot, EmptyNetworkIsHeaderAndFooter) {
  EXPECT_EQ(export_dot(Network{}), "digraph behavior_network {\n  rankdir=LR;\n}\n");
}

TEST(Dot, Deterministic) {
  auto a = box_network();
  auto b = Network::from_agents({move_to("window"), move_to("towel"), pick_up_towel(), clean_window_with_towel()},
                                {Status::normalize("window clean")});
  EXPECT_EQ(export_dot(a), export_dot(b));
}

TEST(Dot, DistanceLabelsAndConflicters) {
  DotOptions o;
  o.distance_seed = Status::normalize("window clean");
  o.show_conflicters = true;
  auto n = Network::from_agents({pick_up_towel(), move_to("towel"),
                                 Agent::make("pick up cup", {"cup in hand"}, {"hand empty", "cup near body"},
                                             {"hand empty"}),
                                 clean_window_with_towel()},
                                {Status::normalize("window clean")});
  const auto dot = export_dot(n, o);
  EXPECT_NE(dot.find("window clean\\n(d=0)"), std::string::npos);
  EXPECT_EQ(count(dot, "style=dotted"), 5u);
}
