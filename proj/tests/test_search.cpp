#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ananet;
using namespace ananet::testing;

namespace {

// Iterative-deepening DFS: length of a shortest plan, or -1.
int shortest_by_iddfs(const Network& net, const WorldState& w0, const StatusSet& goals, int max_depth) {
  auto met = [&](const WorldState& w) {
    return std::all_of(goals.begin(), goals.end(), [&](const Status& g) { return w.count(g) != 0; });
  };
  std::function<bool(const WorldState&, int)> dfs = [&](const WorldState& w, int left) {
    if (met(w)) return true;
    if (left == 0) return false;
    for (const auto& a : net.agents())
      if (executable(a, w) && dfs(ananet::apply(a, w), left - 1)) return true;
    return false;
  };
  for (int d = 0; d <= max_depth; ++d)
    if (dfs(w0, d)) return d;
  return -1;
}

std::size_t index_of(const std::vector<std::string>& plan, const std::string& name) {
  return static_cast<std::size_t>(std::find(plan.begin(), plan.end(), name) - plan.begin());
}

}  // namespace

TEST(Bfs, MinimalNetworkPlanOfLengthFour) {
  auto plan = bfs_oracle(box_network(), world0(), goal_window_clean());
  ASSERT_TRUE(plan);
  EXPECT_EQ(plan->size(), 4u);
  EXPECT_LT(index_of(*plan, "move to towel"), index_of(*plan, "pick up towel"));
  EXPECT_LT(index_of(*plan, "pick up towel"), index_of(*plan, "clean window with towel"));
  EXPECT_LT(index_of(*plan, "move to window"), index_of(*plan, "clean window with towel"));
  EXPECT_TRUE(replays_to_goals(box_network(), world0(), *plan, goal_window_clean()));
}

TEST(Bfs, BothMoveOrdersSucceed) {
  auto net = box_network();
  const std::vector<std::string> a{"move to towel", "move to window", "pick up towel", "clean window with towel"};
  const std::vector<std::string> b{"move to window", "move to towel", "pick up towel", "clean window with towel"};
  EXPECT_TRUE(replays_to_goals(net, world0(), a, goal_window_clean()));
  EXPECT_TRUE(replays_to_goals(net, world0(), b, goal_window_clean()));
}

TEST(Bfs, GoalInWorldGivesEmptyPlan) {
  auto w = world0();
  w.insert(Status::normalize("window clean"));
  auto plan = bfs_oracle(box_network(), w, goal_window_clean());
  ASSERT_TRUE(plan);
  EXPECT_TRUE(plan->empty());
}

TEST(Bfs, UnreachableGivesNone) {
  auto net = Network::from_agents({pick_up_towel(), move_to("towel")}, {}, goal_window_clean());
  EXPECT_FALSE(bfs_oracle(net, world0(), goal_window_clean()));
}

TEST(Bfs, RefusesLargeNetworksWithoutOverride) {
  std::vector<Agent> agents;
  for (int i = 0; i < 51; ++i) agents.push_back(move_to("thing" + std::to_string(i)));
  auto net = Network::from_agents(agents);
  StatusSet goals{Status::normalize("thing0 near body")};
  EXPECT_THROW(bfs_oracle(net, {}, goals), InvalidConfig);
  SearchOptions o;
  o.allow_large = true;
  EXPECT_FALSE(bfs_oracle(net, {}, goals, o));
}

TEST(Bfs, StateCap) {
  std::vector<Agent> agents;
  WorldState w;
  for (int i = 0; i < 12; ++i) {
    agents.push_back(move_to("thing" + std::to_string(i)));
    w.insert(Status::normalize("thing" + std::to_string(i) + " far from body"));
  }
  auto net = Network::from_agents(agents, {}, make_status_set({"window clean"}));
  SearchOptions o;
  o.state_cap = 100;
  EXPECT_THROW(bfs_oracle(net, w, goal_window_clean(), o), SearchBudgetExceeded);
}

TEST(Bfs, ShortestAgreesWithIddfsOnRandomNetworks) {
  std::mt19937_64 rng(17);
  int solved = 0;
  for (int i = 0; i < 150; ++i) {
    auto net = random_network(rng, 8);
    auto world = random_world(rng, net);
    StatusSet goals{net.status_list()[rng() % net.status_list().size()]};
    SearchOptions o;
    o.max_depth = 5;
    auto plan = bfs_oracle(net, world, goals, o);
    const int want = shortest_by_iddfs(net, world, goals, 5);
    if (want < 0) {
      EXPECT_FALSE(plan);
      continue;
    }
    ++solved;
    ASSERT_TRUE(plan);
    EXPECT_EQ(static_cast<int>(plan->size()), want);
    EXPECT_TRUE(replays_to_goals(net, world, *plan, goals));
  }
  EXPECT_GT(solved, 30);
}
