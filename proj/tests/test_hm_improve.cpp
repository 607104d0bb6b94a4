#include <gtest/gtest.h>

#include "support/brute.hpp"
#include "support/fixtures.hpp"

using namespace coremarket;

namespace {

HmImproveOptions checked() { return {.check_invariants = true}; }

}  // namespace

TEST(HmImprove, UnchangedWhenStillInCore) {
  auto h = fx::market("agent p\nagent q\nlist q : p > @self\nlist p : q > @self\n");
  auto x = fx::alloc(h, "p -> q\nq -> p\n");
  auto r = hm_improve_traced(h, h, h.agent("p"), x, checked());
  EXPECT_TRUE(r.unchanged);
  EXPECT_EQ(r.allocation[h.agent("p")], h.agent("q"));
}

TEST(HmImprove, PGetsTheHouseSheWasDenied) {
  // q used to prefer r; after promoting p, q trades with p instead.
  auto h = fx::market(
      "agent p\nagent q\nagent r\n"
      "list p : q > @self\nlist q : r > p > @self\nlist r : q > @self\n");
  auto h2 = fx::market(
      "agent p\nagent q\nagent r\n"
      "list p : q > @self\nlist q : p > r > @self\nlist r : q > @self\n");
  AgentId p = h.agent("p");
  auto x = fx::alloc(h, "q -> r\nr -> q\n");
  ASSERT_TRUE(check_core(h, x).in_core());
  ASSERT_FALSE(check_core(h2, x).in_core());
  auto r = hm_improve_traced(h, h2, p, x, checked());
  EXPECT_FALSE(r.unchanged);
  EXPECT_EQ(r.shadowed, std::vector<AgentId>{h.agent("q")});
  EXPECT_EQ(r.allocation[p], h.agent("q"));
  EXPECT_TRUE(check_core(h2, r.allocation).in_core());
  EXPECT_LE(r.iterations, r.iteration_bound);
}

TEST(HmImprove, RejectsNonImprovementAndBlockedInput) {
  auto h = fx::market("agent p\nagent q\nagent r\nlist q : r > p > @self\nlist r : q > @self\n");
  auto bad = fx::market("agent p\nagent q\nagent r\nlist q : p > @self\nlist r : q > @self\n");
  AgentId p = h.agent("p");
  try {
    (void)hm_improve(h, bad, p, fx::alloc(h, "q -> r\nr -> q\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAnImprovement);
  }
  try {
    (void)hm_improve(h, h, p, Allocation::identity(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInCore);
  }
}

TEST(HmImprove, AgreesWithCoreOnRandomInstances) {
  SplitMix64 rng(99);
  std::size_t repaired = 0;
  for (std::uint64_t seed = 1; seed <= 250; ++seed) {
    RandomModel m{.seed = seed, .n = 2 + seed % 6, .model = fx::model_of(seed)};
    auto h = gen_random(m);
    AgentId p = agent_id(rng.below(m.n));
    auto h2 = apply_improvement(h, random_improvement(h, p, rng, 0.7));
    auto core = brute::core(h);
    ASSERT_FALSE(core.empty());
    const auto& x = core[rng.below(core.size())];
    auto r = hm_improve_traced(h, h2, p, x, checked());
    ASSERT_TRUE(check_core(h2, r.allocation).in_core()) << "seed " << seed;
    ASSERT_FALSE(brute::blocked(h2, r.allocation)) << "seed " << seed;
    AgentId before = x[p], after = r.allocation[p];
    ASSERT_TRUE(before == after || h2.prefs(p).less(before, after)) << "seed " << seed;
    repaired += !r.unchanged;
  }
  EXPECT_GT(repaired, 10u);
}

TEST(HmImprove, LargeWeakMarketWithinIterationBound) {
  auto [h, h2, p, x] = scaling_case(20000, 5);
  ASSERT_FALSE(check_core(h2, x).in_core());
  auto r = hm_improve_traced(h, h2, p, x, checked());
  EXPECT_FALSE(r.unchanged);
  EXPECT_TRUE(check_core(h2, r.allocation).in_core());
  EXPECT_LE(r.iterations, r.iteration_bound);
}
