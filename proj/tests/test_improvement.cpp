#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace coremarket;

namespace {

AgentId A(std::size_t i) { return agent_id(i); }

}  // namespace

// q = 0, p = 1, other houses 2 and 3.
TEST(Improvement, MovingPUpIsAnImprovement) {
  auto before = PreferencePoset::from_list(A(0), {A(2), A(1), A(3)});
  auto after = PreferencePoset::from_list(A(0), {A(1), A(2), A(3)});
  EXPECT_TRUE(is_pq_improvement(before, after, A(1)));
  EXPECT_FALSE(is_pq_improvement(after, before, A(1)));
}

TEST(Improvement, IdenticalOrdersAreATrivialImprovement) {
  auto p = PreferencePoset::from_list(A(0), {A(2), A(1)});
  EXPECT_TRUE(is_pq_improvement(p, p, A(1)));
}

TEST(Improvement, ReorderingOtherHousesIsNot) {
  auto before = PreferencePoset::from_list(A(0), {A(2), A(3), A(1)});
  auto after = PreferencePoset::from_list(A(0), {A(3), A(2), A(1)});
  EXPECT_TRUE(pq_improvement_violation(before, after, A(1)).has_value());
}

TEST(Improvement, DroppingOrAddingOtherHousesIsNot) {
  auto before = PreferencePoset::from_list(A(0), {A(2), A(1)});
  auto after = PreferencePoset::from_list(A(0), {A(1)});
  EXPECT_FALSE(is_pq_improvement(before, after, A(1)));
  EXPECT_FALSE(is_pq_improvement(after, before, A(1)));
}

TEST(Improvement, PMayNotBecomeUnacceptable) {
  auto before = PreferencePoset::from_list(A(0), {A(2), A(1)});
  auto after = PreferencePoset::from_list(A(0), {A(2)});
  EXPECT_FALSE(is_pq_improvement(before, after, A(1)));
}

TEST(Improvement, BreakingATieInFavourOfP) {
  auto before = PreferencePoset::from_classes(A(0), {{A(1), A(2)}});
  auto after = PreferencePoset::from_list(A(0), {A(1), A(2)});
  EXPECT_TRUE(is_pq_improvement(before, after, A(1)));
  EXPECT_FALSE(is_pq_improvement(before, PreferencePoset::from_list(A(0), {A(2), A(1)}), A(1)));
}

TEST(Improvement, MakingPIncomparableToABetterHouse) {
  // before: 0 < 1 < 2; after: 0 < 1, 0 < 2, 1 and 2 incomparable.
  auto before = PreferencePoset::from_list(A(0), {A(2), A(1)});
  auto after = PreferencePoset::build(A(0), {A(1), A(2)}, {{A(0), A(1)}, {A(0), A(2)}});
  EXPECT_TRUE(is_pq_improvement(before, after, A(1)));
  EXPECT_FALSE(is_pq_improvement(after, before, A(1)));
}

TEST(Improvement, NewlyAcceptablePOnlyBelowHousesAboveOwn) {
  auto before = PreferencePoset::from_list(A(0), {A(2)});
  EXPECT_TRUE(is_pq_improvement(before, PreferencePoset::from_list(A(0), {A(2), A(1)}), A(1)));
  // p may also stay incomparable to the own house.
  auto loose = PreferencePoset::build(A(0), {A(1), A(2)}, {{A(0), A(2)}, {A(1), A(2)}});
  EXPECT_TRUE(is_pq_improvement(before, loose, A(1)));

  // House 2 is acceptable but not compared with the own house: a new p may not
  // be put under it.
  auto flat = PreferencePoset::build(A(0), {A(2)}, {});
  auto under = PreferencePoset::build(A(0), {A(1), A(2)}, {{A(1), A(2)}});
  EXPECT_FALSE(is_pq_improvement(flat, under, A(1)));
  auto beside = PreferencePoset::build(A(0), {A(1), A(2)}, {});
  EXPECT_TRUE(is_pq_improvement(flat, beside, A(1)));
}

TEST(Improvement, OwnPreferencesOfPMustStay) {
  auto before = PreferencePoset::from_list(A(1), {A(2), A(0)});
  auto after = PreferencePoset::from_list(A(1), {A(0), A(2)});
  EXPECT_FALSE(is_pq_improvement(before, after, A(1)));
}

TEST(Improvement, ApplyRejectsRepeatedAndNoOpSteps) {
  auto h = fx::market("agent p\nagent q\nagent r\nlist q : r > p > @self\n");
  AgentId p = h.agent("p"), q = h.agent("q"), r = h.agent("r");
  auto up = PreferencePoset::from_list(q, {p, r});
  auto h2 = apply_improvement(h, {p, {{q, up}}});
  EXPECT_TRUE(is_p_improvement(h, h2, p));
  EXPECT_EQ(changed_agents(h, h2), std::vector<AgentId>{q});
  EXPECT_THROW(apply_improvement(h, {p, {{q, up}, {q, up}}}), Error);
  EXPECT_THROW(apply_improvement(h, {p, {{q, h.prefs(q)}}}), Error);
  EXPECT_THROW(apply_improvement(h, {p, {{r, h.prefs(r)}}}), Error);
}

TEST(Improvement, MarketLevelCheckNamesTheAgent) {
  auto h = fx::market("agent p\nagent q\nagent r\nlist q : r > p > @self\n");
  auto h2 = fx::market("agent p\nagent q\nagent r\nlist q : p > @self\n");
  auto why = p_improvement_violation(h, h2, h.agent("p"));
  ASSERT_TRUE(why.has_value());
  EXPECT_NE(why->find("q"), std::string::npos);
}

TEST(Improvement, DifferentAgentSetsRejected) {
  auto h = fx::market("agent p\nagent q\n");
  auto h2 = fx::market("agent p\nagent z\n");
  try {
    require_same_agents(h, h2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AgentSetMismatch);
  }
}

TEST(Improvement, MoveInWeakOrder) {
  auto before = PreferencePoset::from_classes(A(0), {{A(2)}, {A(3), A(4)}, {A(1)}});
  auto tied = move_in_weak_order(before, A(1), 1, true);
  EXPECT_TRUE(tied.incomparable(A(1), A(3)));
  EXPECT_TRUE(is_pq_improvement(before, tied, A(1)));
  auto top = move_in_weak_order(before, A(1), 0, false);
  EXPECT_TRUE(top.less(A(2), A(1)));
  EXPECT_THROW(move_in_weak_order(before, A(1), 3, true), Error);
}
