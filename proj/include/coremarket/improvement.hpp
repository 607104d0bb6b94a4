#ifndef COREMARKET_IMPROVEMENT_HPP
#define COREMARKET_IMPROVEMENT_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coremarket/error.hpp"
#include "coremarket/market.hpp"
#include "coremarket/poset.hpp"

namespace coremarket {

struct ImprovementStep {
  AgentId q;
  PreferencePoset poset;  // new preferences of q
};

// A p-improvement as a sequence of (p, q)-improvements with distinct q.
struct ImprovementSpec {
  AgentId p;
  std::vector<ImprovementStep> steps;
};

// Why `after` is not a (p, q)-improvement of `before` (q is the owner), or
// nullopt if it is one. Beyond leaving all comparisons among houses other than
// p untouched and keeping everything that was below p below it, p may not end
// up below a house it was not below before. Unacceptable houses count as
// below the owner, so a newly acceptable p may only be placed under houses
// the owner ranks above her own.
inline std::optional<std::string> pq_improvement_violation(const PreferencePoset& before,
                                                           const PreferencePoset& after,
                                                           AgentId p) {
  const AgentId q = before.owner();
  if (after.owner() != q) return "the two orders belong to different agents";
  if (before == after) return std::nullopt;
  if (q == p) return "the improved agent's own preferences changed";

  std::vector<AgentId> rest_before, rest_after;
  for (AgentId h : before.acceptable())
    if (h != p) rest_before.push_back(h);
  for (AgentId h : after.acceptable())
    if (h != p) rest_after.push_back(h);
  if (rest_before != rest_after) return "acceptability of a house other than p changed";
  const bool had_p = before.accepts(p);
  if (had_p && !after.accepts(p)) return "p became unacceptable";

  for (AgentId x : rest_before)
    for (AgentId y : rest_before)
      if (before.less(x, y) != after.less(x, y)) return "a comparison not involving p changed";

  if (had_p) {
    for (AgentId x : rest_before)
      if (before.less(x, p) && !after.less(x, p)) return "p lost its advantage over a house";
  }
  for (AgentId y : rest_before) {
    if (!after.less(p, y)) continue;
    bool was_below = had_p ? before.less(p, y) : before.less(q, y);
    if (!was_below) return "p was demoted below a house";
  }
  return std::nullopt;
}

inline bool is_pq_improvement(const PreferencePoset& before, const PreferencePoset& after,
                              AgentId p) {
  return !pq_improvement_violation(before, after, p).has_value();
}

inline void require_same_agents(const HousingMarket& h, const HousingMarket& h2) {
  if (h.names() != h2.names())
    throw Error(ErrorCode::AgentSetMismatch,
                "both markets must declare the same agents in the same order");
}

// Agents whose preferences differ between the two markets.
inline std::vector<AgentId> changed_agents(const HousingMarket& h, const HousingMarket& h2) {
  require_same_agents(h, h2);
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < h.agent_count(); ++i)
    if (!(h.prefs(agent_id(i)) == h2.prefs(agent_id(i)))) out.push_back(agent_id(i));
  return out;
}

// First violation of H2 being a p-improvement of H, as "agent: reason".
inline std::optional<std::string> p_improvement_violation(const HousingMarket& h,
                                                          const HousingMarket& h2, AgentId p) {
  for (AgentId q : changed_agents(h, h2)) {
    if (auto why = pq_improvement_violation(h.prefs(q), h2.prefs(q), p))
      return h.name(q) + ": " + *why;
  }
  return std::nullopt;
}

inline bool is_p_improvement(const HousingMarket& h, const HousingMarket& h2, AgentId p) {
  return !p_improvement_violation(h, h2, p).has_value();
}

inline HousingMarket apply_improvement(const HousingMarket& h, const ImprovementSpec& spec) {
  HousingMarket current = h;
  std::vector<char> seen(h.agent_count(), 0);
  for (const ImprovementStep& step : spec.steps) {
    if (index(step.q) >= h.agent_count())
      throw Error(ErrorCode::UnknownAgent, "improvement step names an unknown agent");
    const std::string& qn = h.name(step.q);
    if (seen[index(step.q)])
      throw Error(ErrorCode::NotAnImprovement, "agent '" + qn + "' appears in two steps");
    seen[index(step.q)] = 1;
    if (step.q == spec.p)
      throw Error(ErrorCode::NotAnImprovement, "a step may not change the improved agent");
    const PreferencePoset& before = current.prefs(step.q);
    if (before == step.poset)
      throw Error(ErrorCode::NotAnImprovement, "step for '" + qn + "' changes nothing");
    if (auto why = pq_improvement_violation(before, step.poset, spec.p))
      throw Error(ErrorCode::NotAnImprovement, qn + ": " + *why);
    current = current.with_preferences(step.q, step.poset);
  }
  return current;
}

// Moves p inside a weak order. The order of `poset` (owner q) is read as tie
// classes; p is removed and then either joins class `target` (tie = true) or
// is placed as a singleton class right before it. `target` counts classes of
// the order without p; target == class count means "at the bottom". Whether
// the result is an improvement is up to the caller to check.
inline PreferencePoset move_in_weak_order(const PreferencePoset& poset, AgentId p,
                                          std::size_t target, bool tie) {
  auto classes = poset.tie_classes();
  if (!classes) throw Error(ErrorCode::BadParams, "preferences are not a weak order");
  std::vector<std::vector<AgentId>> rest;
  for (auto& c : *classes) {
    c.erase(std::remove(c.begin(), c.end(), p), c.end());
    if (!c.empty()) rest.push_back(std::move(c));
  }
  if (target > rest.size() || (tie && target == rest.size()))
    throw Error(ErrorCode::BadParams, "target class out of range");
  if (tie) {
    rest[target].push_back(p);
  } else {
    rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(target), std::vector<AgentId>{p});
  }
  return PreferencePoset::from_classes(poset.owner(), rest);
}

}  // namespace coremarket

#endif  // COREMARKET_IMPROVEMENT_HPP
