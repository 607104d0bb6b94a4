#include <gtest/gtest.h>

#include "support/brute.hpp"
#include "support/fixtures.hpp"

using namespace coremarket;

TEST(Ttc, SingleAgentKeepsHouse) {
  auto h = fx::market("agent a\n");
  auto x = ttc(h);
  EXPECT_EQ(x[agent_id(0)], agent_id(0));
}

TEST(Ttc, StrictTriangleTrades) {
  auto h = fx::market(
      "agent a\nagent b\nagent c\n"
      "list a : b > @self\nlist b : c > @self\nlist c : a > @self\n");
  auto x = ttc(h);
  EXPECT_EQ(x.trading_count(), 3u);
  EXPECT_TRUE(check_core(h, x).in_core());
}

TEST(Ttc, ClassicStrictExampleMatchesUniqueStrictCore) {
  // Strict preferences: the TTC result is the unique strict core allocation.
  auto h = fx::market(
      "agent a\nagent b\nagent c\nagent d\n"
      "list a : c > b > @self\n"
      "list b : a > d > @self\n"
      "list c : a > b > @self\n"
      "list d : c > @self\n");
  auto x = ttc(h);
  auto sc = brute::strict_core(h);
  ASSERT_EQ(sc.size(), 1u);
  EXPECT_TRUE(std::equal(x.targets().begin(), x.targets().end(), sc[0].targets().begin()));
  EXPECT_EQ(x[h.agent("a")], h.agent("c"));
  EXPECT_EQ(x[h.agent("c")], h.agent("a"));
}

TEST(Ttc, IncomparableHousesStillGiveCore) {
  auto h = fx::market(
      "agent a\nagent b\nagent c\n"
      "accept a : b c\ncover a : a < b\n"
      "list b : [a c] > @self\n"
      "accept c : a b\ncover c : b < a\n");
  EXPECT_TRUE(check_core(h, ttc(h)).in_core());
}

TEST(Ttc, OutputAlwaysInCoreOnRandomMarkets) {
  for (std::uint64_t seed = 1; seed <= 600; ++seed) {
    RandomModel m{.seed = seed, .n = 1 + seed % 30, .model = fx::model_of(seed), .density = 0.3 + (seed % 5) * 0.15};
    auto h = gen_random(m);
    auto x = ttc(h);
    ASSERT_NO_THROW(validate_allocation(h, x));
    ASSERT_TRUE(check_core(h, x).in_core()) << "seed " << seed;
  }
}

TEST(Ttc, RestrictedRunLeavesOthersAlone) {
  auto h = fx::market(
      "agent a\nagent b\nagent c\n"
      "list a : b > @self\nlist b : c > a > @self\nlist c : b > @self\n");
  std::vector<AgentId> active{h.agent("a"), h.agent("b")};
  auto x = ttc_restricted(h, active);
  EXPECT_EQ(x[h.agent("c")], h.agent("c"));
  EXPECT_EQ(x[h.agent("a")], h.agent("b"));
  EXPECT_EQ(x[h.agent("b")], h.agent("a"));
}

// Absent houses can free a node of H_b before the initial scan reaches it.
TEST(Ttc, RestrictedRunMatchesSubmarketRun) {
  SplitMix64 rng(31);
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    auto h = gen_random({.seed = seed, .n = 2 + seed % 25, .model = fx::model_of(seed), .density = 0.6});
    std::vector<AgentId> active;
    for (std::size_t a = 0; a < h.agent_count(); ++a)
      if (rng.bernoulli(0.6)) active.push_back(agent_id(a));
    auto x = ttc_restricted(h, active);
    auto sub = h.submarket(active);
    auto y = ttc(sub);
    ASSERT_TRUE(check_core(sub, y).in_core());
    for (std::size_t a = 0; a < h.agent_count(); ++a) {
      auto it = std::find(active.begin(), active.end(), agent_id(a));
      if (it == active.end()) {
        ASSERT_EQ(x[agent_id(a)], agent_id(a)) << "seed " << seed;
      } else {
        const std::size_t i = static_cast<std::size_t>(it - active.begin());
        ASSERT_EQ(x[agent_id(a)], active[index(y[agent_id(i)])]) << "seed " << seed;
      }
    }
  }
}

TEST(Ttc, DeterministicAcrossRuns) {
  auto h = gen_random({.seed = 7, .n = 40, .model = PreferenceModel::Poset});
  auto x = ttc(h), y = ttc(h);
  EXPECT_TRUE(std::equal(x.targets().begin(), x.targets().end(), y.targets().begin()));
}
