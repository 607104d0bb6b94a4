#include <gtest/gtest.h>

#include "support/brute.hpp"
#include "support/fixtures.hpp"
#include "support/walks.hpp"

using namespace coremarket;

namespace {

RoommatesInstance rm(std::string_view body) { return RoommatesInstance(fx::market(body)); }

// Four agents, no stable matching: a, b, c cycle over each other and all rank d last.
const char* kNoStable =
    "agent a\nagent b\nagent c\nagent d\n"
    "list a : b > c > d > @self\n"
    "list b : c > a > d > @self\n"
    "list c : a > b > d > @self\n"
    "list d : a > b > c > @self\n";

}  // namespace

TEST(Roommates, InstanceValidation) {
  try {
    rm("agent a\nagent b\nlist a : b > @self\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInstance);
  }
  try {
    rm("agent a\nagent b\nlist a : [b @self]\nlist b : a > @self\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInstance);
  }
  EXPECT_THROW(rm("agent a\nagent b\nagent c\naccept a : b c\ncover a : a < b\nlist b : a > @self\nlist c : a > @self\n"),
               Error);
}

TEST(Roommates, RanksAndLists) {
  auto r = rm("agent a\nagent b\nagent c\nlist a : [c b] > @self\nlist b : a > @self\nlist c : a > @self\n");
  AgentId a = agent_id(0), b = agent_id(1), c = agent_id(2);
  EXPECT_EQ(r.rank(a, b), 0u);
  EXPECT_EQ(r.rank(a, c), 0u);
  EXPECT_EQ(r.rank(a, a), 1u);
  EXPECT_EQ(r.rank(b, c), RoommatesInstance::kUnacceptable);
  EXPECT_EQ(r.list(a), (std::vector<AgentId>{b, c}));
  EXPECT_FALSE(r.is_strict());
  EXPECT_EQ(r.edge_count(), 2u);
  EXPECT_THROW(find_stable(r), Error);
}

TEST(Roommates, MatchingValidation) {
  auto r = rm("agent a\nagent b\nagent c\nlist a : b > @self\nlist b : a > @self\n");
  Matching m(3);
  m.match(agent_id(0), agent_id(1));
  EXPECT_NO_THROW(validate_matching(r, m));
  Matching bad(3);
  bad.match(agent_id(0), agent_id(2));
  EXPECT_THROW(validate_matching(r, bad), Error);
  EXPECT_EQ(m.pairs().size(), 1u);
}

TEST(Roommates, NoStableMatching) {
  auto r = rm(kNoStable);
  EXPECT_FALSE(find_stable(r).has_value());
  EXPECT_TRUE(brute::stable_matchings(r).empty());
}

TEST(Roommates, StableMatchingFound) {
  auto r = rm(
      "agent a\nagent b\nagent c\nagent d\n"
      "list a : b > c > d > @self\nlist b : a > d > c > @self\n"
      "list c : d > a > b > @self\nlist d : c > b > a > @self\n");
  auto m = find_stable(r);
  ASSERT_TRUE(m.has_value());
  EXPECT_TRUE(check_stable(r, *m).stable());
  EXPECT_EQ((*m)[agent_id(0)], agent_id(1));
  EXPECT_EQ((*m)[agent_id(2)], agent_id(3));
}

TEST(Roommates, IrvingAgreesWithBruteForce) {
  for (std::uint64_t seed = 1; seed <= 1500; ++seed) {
    auto r = gen_random_roommates(1 + seed % 8, 0.3 + (seed % 7) * 0.1, seed);
    auto all = brute::stable_matchings(r);
    auto m = find_stable(r);
    ASSERT_EQ(m.has_value(), !all.empty()) << "seed " << seed;
    if (m) {
      ASSERT_NO_THROW(validate_matching(r, *m));
      ASSERT_TRUE(brute::stable(r, *m)) << "seed " << seed;
    }
    ASSERT_EQ(all.size(), all_stable_matchings(r).size());
  }
}

TEST(Roommates, StrongStabilityMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto strict = gen_random_roommates(2 + seed % 5, 0.6, seed);
    // Merge some neighbouring classes to create ties.
    SplitMix64 rng(seed);
    auto r = strict;
    for (std::size_t a = 0; a < r.agent_count(); ++a) {
      auto cls = r.classes(agent_id(a));
      for (std::size_t i = 1; i < cls.size();) {
        if (rng.bernoulli(0.4)) {
          cls[i - 1].insert(cls[i - 1].end(), cls[i].begin(), cls[i].end());
          cls.erase(cls.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
          ++i;
        }
      }
      r = r.with_list(agent_id(a), cls);
    }
    for (const auto& m : brute::all_matchings(r))
      ASSERT_EQ(check_strongly_stable(r, m).stable(), brute::strongly_stable(r, m)) << "seed " << seed;
  }
}

TEST(Roommates, TruncationIsSymmetric) {
  auto r = rm(
      "agent a\nagent b\nagent c\n"
      "list a : b > c > @self\nlist b : a > c > @self\nlist c : a > b > @self\n");
  auto t = r.truncated(agent_id(0), 1);
  EXPECT_EQ(t.list(agent_id(0)), std::vector<AgentId>{agent_id(1)});
  EXPECT_EQ(t.list(agent_id(2)), std::vector<AgentId>{agent_id(1)});
}

TEST(Roommates, ProposalRejectionStopsAtFreeAgent) {
  // a is the proposer; b is free and accepts a.
  auto r = rm("agent a\nagent b\nlist a : b > @self\nlist b : a > @self\n");
  ProposalRejectionSequence seq(r, Matching(2), agent_id(0));
  EXPECT_EQ(seq.step(), ProposalRejectionSequence::Status::Stopped);
  EXPECT_EQ(seq.stopped_at(), agent_id(1));
  EXPECT_EQ(seq.matching()[agent_id(0)], agent_id(1));
}

TEST(Roommates, SrImproveReturnsUnchangedWhenStillStable) {
  auto r = rm(
      "agent a\nagent b\nagent c\nagent d\n"
      "list a : b > c > d > @self\nlist b : a > d > c > @self\n"
      "list c : d > a > b > @self\nlist d : c > b > a > @self\n");
  auto m = *find_stable(r);
  // d moves b to the top: a and b still prefer each other.
  auto r2 = r.with_list(agent_id(3), {{agent_id(1)}, {agent_id(2)}, {agent_id(0)}});
  auto res = sr_improve_traced(r, r2, agent_id(1), agent_id(3), m, {.check_invariants = true});
  EXPECT_EQ(res.route, SrImproveResult::Route::Unchanged);
  ASSERT_TRUE(res.matching.has_value());
  EXPECT_EQ(*res.matching, m);
}

TEST(Roommates, SrImproveRejectsChangesByOthers) {
  auto r = rm("agent a\nagent b\nagent c\nlist a : b > c > @self\nlist b : a > @self\nlist c : a > @self\n");
  auto m = *find_stable(r);
  auto r2 = r.with_list(agent_id(0), {{agent_id(2)}, {agent_id(1)}});
  try {
    (void)sr_improve(r, r2, agent_id(2), agent_id(1), m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAnImprovement);
  }
}

TEST(Roommates, SrImproveAgreesWithEnumeration) {
  SplitMix64 rng(2024);
  std::size_t tested = 0;
  for (std::uint64_t seed = 1; tested < 400 && seed < 100000; ++seed) {
    const std::size_t n = 2 + seed % 9;
    auto r = gen_random_roommates(n, 0.5, seed);
    auto m = find_stable(r);
    if (!m) continue;
    AgentId p = agent_id(rng.below(n)), q = agent_id(rng.below(n));
    if (p == q) continue;
    auto r2 = random_roommates_improvement(r, p, q, rng);
    if (!r2) continue;
    ++tested;
    auto res = sr_improve_traced(r, *r2, p, q, *m, {.check_invariants = true});
    auto all = brute::stable_matchings(*r2);
    ASSERT_EQ(res.matching.has_value(), !all.empty()) << "seed " << seed;
    if (res.matching) {
      ASSERT_TRUE(brute::stable(*r2, *res.matching)) << "seed " << seed;
      ASSERT_LE(r2->rank(p, (*res.matching)[p]), r2->rank(p, (*m)[p])) << "seed " << seed;
    }
  }
  EXPECT_EQ(tested, 400u);
}

TEST(Roommates, SrImproveWalkWithReferenceMatching) {
  auto cases = walks::forced_walk_cases(8, 5150);
  ASSERT_EQ(cases.size(), 8u);
  for (const auto& c : cases) {
    auto res = sr_improve_traced(c.h, c.h2, c.p, c.q, c.m, {.check_invariants = true, .reference = &c.reference});
    EXPECT_EQ(res.route, SrImproveResult::Route::Sequence);
    ASSERT_TRUE(res.matching.has_value());
    EXPECT_TRUE(brute::stable(c.h2, *res.matching));
    EXPECT_LE(c.h2.rank(c.p, (*res.matching)[c.p]), c.h2.rank(c.p, c.m[c.p]));
    EXPECT_GT(res.sequence_steps, 0u);
  }
}

TEST(Roommates, SrImproveRejectsUnstableReference) {
  auto cases = walks::forced_walk_cases(1, 99);
  ASSERT_EQ(cases.size(), 1u);
  const auto& c = cases[0];
  Matching empty(c.h2.agent_count());
  try {
    (void)sr_improve(c.h, c.h2, c.p, c.q, c.m, {.reference = &empty});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotStable);
  }
}
