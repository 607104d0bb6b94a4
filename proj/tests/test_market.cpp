#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace coremarket;

TEST(Market, SingleAgent) {
  auto h = fx::market("agent a\n");
  EXPECT_EQ(h.agent_count(), 1u);
  EXPECT_EQ(h.prefs(agent_id(0)).acceptable_count(), 1u);
  auto g = acceptability_graph(h);
  EXPECT_EQ(g.vertex_count, 1u);
  ASSERT_EQ(g.arcs.size(), 1u);
  EXPECT_EQ(g.arcs[0], (Arc{agent_id(0), agent_id(0)}));
  EXPECT_EQ(g.size(), 2u);
}

TEST(Market, AcceptabilityGraphHasLoops) {
  auto h = fx::market("agent a\nagent b\naccept a : b\n");
  auto g = acceptability_graph(h);
  AgentId a = h.agent("a"), b = h.agent("b");
  std::vector<Arc> want{{a, a}, {a, b}, {b, b}};
  EXPECT_EQ(g.arcs, want);
  EXPECT_EQ(h.arc_count(), 3u);
}

TEST(Market, CyclicCoversRejected) {
  try {
    fx::market("agent a\nagent b\nagent c\naccept a : b c\ncover a : b < c\ncover a : c < b\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CyclicPreference);
  }
}

TEST(Market, UnknownAndDuplicateAgents) {
  try {
    fx::market("agent a\naccept a : zz\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAgent);
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    fx::market("agent a\nagent a\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateAgent);
  }
}

TEST(Market, SelfDispreferredRejected) {
  try {
    fx::market("agent a\nagent b\naccept a : b\ncover a : b < a\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SelfDispreferred);
  }
}

TEST(Market, InArcsSortedWithLoop) {
  auto h = fx::market("agent a\nagent b\nagent c\nlist c : a > @self\nlist b : a > @self\n");
  auto in = h.in_arcs(h.agent("a"));
  ASSERT_EQ(in.size(), 3u);
  EXPECT_EQ(in[0].source, h.agent("a"));
  EXPECT_EQ(in[1].source, h.agent("b"));
  EXPECT_EQ(in[2].source, h.agent("c"));
}

TEST(Market, DescriptionSize) {
  // a: a < c < b (3 vertices, 2 covers); b: [a c] > b (3 vertices, 2 covers); c: 1 vertex.
  auto h = fx::market("agent a\nagent b\nagent c\nlist a : b > c > @self\nlist b : [a c] > @self\n");
  EXPECT_EQ(h.description_size(), 5u + 5u + 1u);
}

TEST(Market, GadgetWithOneVertexHasEightAgents) {
  auto g = gadget_arc_in_core(Digraph::make(1, {}));
  EXPECT_EQ(g.market.agent_count(), 8u);
  const auto& bstar = g.market.prefs(g.to);
  EXPECT_EQ(bstar.acceptable_count() - 1, 3u);  // a0, a1, a*
  EXPECT_TRUE(bstar.accepts(g.market.agent("a0")));
  EXPECT_TRUE(bstar.accepts(g.market.agent("a1")));
  EXPECT_TRUE(bstar.accepts(g.from));
  EXPECT_TRUE(bstar.less(g.from, g.market.agent("a1")));
  EXPECT_TRUE(bstar.less(g.market.agent("a1"), g.market.agent("a0")));
}

TEST(Market, SubmarketRestrictsPreferences) {
  auto h = fx::market("agent a\nagent b\nagent c\nlist a : b > c > @self\nlist c : a > @self\n");
  std::vector<AgentId> keep{h.agent("a"), h.agent("c")};
  auto s = h.submarket(keep);
  ASSERT_EQ(s.agent_count(), 2u);
  EXPECT_EQ(s.name(agent_id(0)), "a");
  EXPECT_TRUE(s.prefs(agent_id(0)).accepts(agent_id(1)));
  EXPECT_TRUE(s.prefs(agent_id(0)).less(agent_id(0), agent_id(1)));
  EXPECT_EQ(s.prefs(agent_id(0)).cover_count(), 1u);
}

TEST(Market, WithPreferencesReplacesOneAgent) {
  auto h = fx::market("agent a\nagent b\n");
  auto h2 = h.with_preferences(h.agent("a"), PreferencePoset::from_list(h.agent("a"), {h.agent("b")}));
  EXPECT_FALSE(h == h2);
  EXPECT_TRUE(h2.prefs(h.agent("a")).accepts(h.agent("b")));
  EXPECT_EQ(changed_agents(h, h2), std::vector<AgentId>{h.agent("a")});
}
