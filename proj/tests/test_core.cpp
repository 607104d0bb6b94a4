#include <gtest/gtest.h>

#include "support/brute.hpp"
#include "support/fixtures.hpp"

using namespace coremarket;

namespace {

// Three agents who each want the next one's house.
const char* kTriangle =
    "agent a\nagent b\nagent c\n"
    "list a : b > @self\nlist b : c > @self\nlist c : a > @self\n";

}  // namespace

TEST(Core, IdentityBlockedByTriangle) {
  auto h = fx::market(kTriangle);
  auto v = check_core(h, Allocation::identity(3));
  ASSERT_FALSE(v.in_core());
  EXPECT_EQ(v.blocking_cycle.size(), 3u);
  for (std::size_t i = 0; i < v.blocking_cycle.size(); ++i) {
    AgentId a = v.blocking_cycle[i], b = v.blocking_cycle[(i + 1) % v.blocking_cycle.size()];
    EXPECT_TRUE(h.prefs(a).less(a, b));
  }
}

TEST(Core, TradingTriangleIsInCore) {
  auto h = fx::market(kTriangle);
  auto x = fx::alloc(h, "a -> b\nb -> c\nc -> a\n");
  EXPECT_TRUE(check_core(h, x).in_core());
  EXPECT_TRUE(check_strict_core(h, x).in_core());
  EXPECT_EQ(x.trading_count(), 3u);
}

TEST(Core, InvalidAllocationRejected) {
  auto h = fx::market(kTriangle);
  Allocation x({agent_id(2), agent_id(0), agent_id(1)});  // a -> c is not acceptable
  try {
    (void)check_core(h, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidAllocation);
  }
}

TEST(Core, TieAllowsCoreButNotStrictCore) {
  // a is indifferent between b and c; b and c both want a. Whoever is left out
  // can swap with a without hurting her, so the strict core is empty.
  auto h = fx::market(
      "agent a\nagent b\nagent c\n"
      "list a : [b c] > @self\nlist b : a > @self\nlist c : a > @self\n");
  for (const char* text : {"a -> b\nb -> a\n", "a -> c\nc -> a\n"}) {
    auto x = fx::alloc(h, text);
    EXPECT_TRUE(check_core(h, x).in_core());
    EXPECT_FALSE(check_strict_core(h, x).in_core());
  }
  EXPECT_TRUE(brute::strict_core(h).empty());
}

TEST(Core, StrictCoreBlockingCycleIsWeaklyImproving) {
  auto h = fx::market(
      "agent a\nagent b\nagent c\n"
      "list a : [b c] > @self\nlist b : a > @self\nlist c : a > @self\n");
  auto x = fx::alloc(h, "a -> c\nc -> a\n");
  auto v = check_strict_core(h, x);
  ASSERT_FALSE(v.in_core());
  bool strict = false;
  for (std::size_t i = 0; i < v.blocking_cycle.size(); ++i) {
    AgentId a = v.blocking_cycle[i], b = v.blocking_cycle[(i + 1) % v.blocking_cycle.size()];
    EXPECT_FALSE(h.prefs(a).less(b, x[a]));
    strict = strict || h.prefs(a).less(x[a], b);
  }
  EXPECT_TRUE(strict);
}

TEST(Core, EnvyGraphArcs) {
  auto h = fx::market(kTriangle);
  auto g = envy_graph(h, Allocation::identity(3));
  std::vector<Arc> want{{agent_id(0), agent_id(1)}, {agent_id(1), agent_id(2)}, {agent_id(2), agent_id(0)}};
  EXPECT_EQ(g.arcs, want);
  auto x = fx::alloc(h, "a -> b\nb -> c\nc -> a\n");
  EXPECT_TRUE(envy_graph(h, x).arcs.empty());
}

TEST(Core, IncomparableHouseDoesNotCreateEnvy) {
  // a accepts b but does not compare it with her own house.
  auto h = fx::market("agent a\nagent b\naccept a : b\nlist b : a > @self\n");
  EXPECT_TRUE(check_core(h, Allocation::identity(2)).in_core());
  // Swapping leaves a no worse off and makes b better off.
  EXPECT_FALSE(check_strict_core(h, Allocation::identity(2)).in_core());
  auto x = fx::alloc(h, "a -> b\nb -> a\n");
  EXPECT_TRUE(check_core(h, x).in_core());
}

TEST(Core, AgreesWithBruteForceOnRandomMarkets) {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    RandomModel m{.seed = seed, .n = 2 + seed % 5, .model = fx::model_of(seed)};
    auto h = gen_random(m);
    for (const auto& x : brute::all_allocations(h)) {
      ASSERT_EQ(check_core(h, x).in_core(), !brute::blocked(h, x)) << "seed " << seed;
      ASSERT_EQ(check_strict_core(h, x).in_core(), !brute::weakly_blocked(h, x)) << "seed " << seed;
    }
  }
}
