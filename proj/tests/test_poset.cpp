#include <gtest/gtest.h>

#include "coremarket/poset.hpp"

using namespace coremarket;

namespace {

AgentId A(std::size_t i) { return agent_id(i); }

}  // namespace

TEST(Poset, TransitiveReductionKeepsOnlyCovers) {
  // owner 0 < 1 < 2 < 3, with the implied pairs given explicitly too.
  auto p = PreferencePoset::build(A(0), {A(1), A(2), A(3)},
                                  {{A(0), A(1)}, {A(1), A(2)}, {A(2), A(3)}, {A(0), A(3)}, {A(1), A(3)}});
  EXPECT_EQ(p.cover_count(), 3u);
  EXPECT_EQ(p.size(), 4u + 3u);
  EXPECT_TRUE(p.less(A(0), A(3)));
  EXPECT_TRUE(p.less(A(1), A(3)));
  EXPECT_FALSE(p.less(A(3), A(1)));
  EXPECT_TRUE(p.is_strict_order());
}

TEST(Poset, OwnerIsAlwaysAcceptable) {
  auto p = PreferencePoset::build(A(2), {}, {});
  ASSERT_EQ(p.acceptable_count(), 1u);
  EXPECT_EQ(p.house(0), A(2));
  EXPECT_TRUE(p.accepts(A(2)));
  EXPECT_FALSE(p.accepts(A(0)));
}

TEST(Poset, CycleIsRejected) {
  try {
    PreferencePoset::build(A(0), {A(1), A(2)}, {{A(1), A(2)}, {A(2), A(1)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CyclicPreference);
  }
}

TEST(Poset, HouseBelowOwnIsRejected) {
  try {
    PreferencePoset::build(A(0), {A(1)}, {{A(1), A(0)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SelfDispreferred);
  }
}

TEST(Poset, RelationOnUnacceptableHouseIsRejected) {
  EXPECT_THROW(PreferencePoset::build(A(0), {A(1)}, {{A(1), A(2)}}), Error);
}

TEST(Poset, IncomparableToOwnHouseIsAllowed) {
  auto p = PreferencePoset::build(A(0), {A(1), A(2)}, {{A(0), A(1)}});
  EXPECT_TRUE(p.incomparable(A(0), A(2)));
  EXPECT_TRUE(p.less_equal(A(0), A(2)));
  EXPECT_TRUE(p.less_equal(A(2), A(0)));
  EXPECT_FALSE(p.is_weak_order());
}

TEST(Poset, UnacceptableHousesAreNeverCompared) {
  auto p = PreferencePoset::from_list(A(0), {A(1)});
  EXPECT_FALSE(p.less(A(2), A(1)));
  EXPECT_FALSE(p.less(A(1), A(2)));
}

TEST(Poset, TieClassesRoundTrip) {
  std::vector<std::vector<AgentId>> cls{{A(3)}, {A(1), A(2)}, {A(0)}};
  auto p = PreferencePoset::from_classes(A(0), cls);
  auto back = p.tie_classes();
  ASSERT_TRUE(back.has_value());
  ASSERT_EQ(back->size(), 3u);
  EXPECT_EQ((*back)[0], std::vector<AgentId>{A(3)});
  EXPECT_EQ((*back)[1], (std::vector<AgentId>{A(1), A(2)}));
  EXPECT_EQ((*back)[2], std::vector<AgentId>{A(0)});
  EXPECT_TRUE(p.is_weak_order());
  EXPECT_FALSE(p.is_strict_order());
  EXPECT_TRUE(p.incomparable(A(1), A(2)));
  // Complete bipartite layers: 1*2 + 2*1 covers.
  EXPECT_EQ(p.cover_count(), 4u);
}

TEST(Poset, OwnerAddedAsLastClassWhenUnlisted) {
  auto p = PreferencePoset::from_classes(A(0), {{A(1), A(2)}});
  EXPECT_TRUE(p.less(A(0), A(1)));
  EXPECT_TRUE(p.less(A(0), A(2)));
}

TEST(Poset, DuplicateHouseInListIsRejected) {
  EXPECT_THROW(PreferencePoset::from_classes(A(0), {{A(1)}, {A(1)}}), Error);
}

TEST(Poset, ForEachAboveAscending) {
  auto p = PreferencePoset::from_list(A(0), {A(3), A(1), A(2)});
  std::vector<AgentId> above;
  p.for_each_above(p.local_index(A(2)), [&](PreferencePoset::Local j) { above.push_back(p.house(j)); });
  EXPECT_EQ(above, (std::vector<AgentId>{A(1), A(3)}));
}

TEST(Poset, CoversSortedAndDownCovers) {
  auto p = PreferencePoset::from_list(A(0), {A(2), A(1)});
  auto c = p.covers();
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], std::make_pair(A(0), A(1)));
  EXPECT_EQ(c[1], std::make_pair(A(1), A(2)));
  auto top = p.local_index(A(2));
  EXPECT_EQ(p.better_covers(top).size(), 0u);
  ASSERT_EQ(p.worse_covers(top).size(), 1u);
  EXPECT_EQ(p.house(p.worse_covers(top)[0]), A(1));
}

TEST(Poset, EqualityIgnoresConstructionRoute) {
  auto a = PreferencePoset::from_list(A(0), {A(2), A(1)});
  auto b = PreferencePoset::build(A(0), {A(1), A(2)}, {{A(0), A(1)}, {A(1), A(2)}, {A(0), A(2)}});
  EXPECT_TRUE(a == b);
}

TEST(Poset, WideClosureBeyondOneWord) {
  std::vector<AgentId> list;
  for (std::size_t i = 1; i <= 130; ++i) list.push_back(A(i));
  auto p = PreferencePoset::from_list(A(0), list);
  EXPECT_TRUE(p.less(A(130), A(1)));
  EXPECT_TRUE(p.less(A(0), A(65)));
  EXPECT_FALSE(p.less(A(1), A(129)));
  EXPECT_EQ(p.cover_count(), 130u);
}
