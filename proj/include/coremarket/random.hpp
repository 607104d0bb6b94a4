#ifndef COREMARKET_RANDOM_HPP
#define COREMARKET_RANDOM_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coremarket/allocation.hpp"
#include "coremarket/error.hpp"
#include "coremarket/improvement.hpp"
#include "coremarket/market.hpp"
#include "coremarket/poset.hpp"
#include "coremarket/roommates.hpp"
#include "coremarket/ttc.hpp"

namespace coremarket {

// SplitMix64 (Steele, Lea, Flood): state += 0x9e3779b97f4a7c15, then the
// 0xbf58476d1ce4e5b9 / 0x94d049bb133111eb finalizer. Bounded integers use
// Lemire's multiply-shift rejection; Bernoulli draws compare the top 53 bits.
// Every generator here draws in a fixed order, so output only depends on the
// seed and parameters.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    using u128 = unsigned __int128;
    u128 m = static_cast<u128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    return static_cast<double>(next() >> 11) * 0x1.0p-53 < p;
  }

  // Fisher-Yates, last position first.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

enum class PreferenceModel { Strict, Weak, Poset };

inline PreferenceModel parse_model(std::string_view s) {
  if (s == "strict") return PreferenceModel::Strict;
  if (s == "weak") return PreferenceModel::Weak;
  if (s == "poset") return PreferenceModel::Poset;
  throw Error(ErrorCode::BadParams, "model must be strict, weak or poset");
}

struct RandomModel {
  std::uint64_t seed = 0;
  std::size_t n = 1;
  PreferenceModel model = PreferenceModel::Strict;
  double density = 0.5;  // each other house acceptable with this probability
  double tie = 0.5;      // weak: next house joins the current tie class
  double edge = 0.3;     // poset: each pair (and owner below a house) related
};

inline std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = "x" + std::to_string(i + 1);
  return names;
}

namespace detail {

inline PreferencePoset random_order(AgentId owner, std::vector<AgentId> others, PreferenceModel model,
                                    double tie, double edge, SplitMix64& rng) {
  rng.shuffle(others);
  if (model == PreferenceModel::Strict) return PreferencePoset::from_list(owner, others);
  if (model == PreferenceModel::Weak) {
    std::vector<std::vector<AgentId>> classes;
    for (AgentId h : others) {
      if (classes.empty() || !rng.bernoulli(tie)) classes.emplace_back();
      classes.back().push_back(h);
    }
    return PreferencePoset::from_classes(owner, classes);
  }
  // Poset: relations respect the shuffled order (earlier = better), and the
  // own house sits below each other house with probability `edge`.
  std::vector<std::pair<AgentId, AgentId>> rel;
  for (std::size_t i = 0; i < others.size(); ++i)
    for (std::size_t j = i + 1; j < others.size(); ++j)
      if (rng.bernoulli(edge)) rel.emplace_back(others[j], others[i]);
  for (AgentId h : others)
    if (rng.bernoulli(edge)) rel.emplace_back(owner, h);
  return PreferencePoset::build(owner, others, rel);
}

}  // namespace detail

inline HousingMarket gen_random(const RandomModel& m) {
  if (m.n == 0) throw Error(ErrorCode::BadParams, "n must be at least 1");
  auto prob_ok = [](double p) { return p >= 0 && p <= 1; };
  if (!prob_ok(m.density) || !prob_ok(m.tie) || !prob_ok(m.edge))
    throw Error(ErrorCode::BadParams, "probabilities must lie in [0, 1]");
  SplitMix64 rng(m.seed);
  std::vector<PreferencePoset> prefs;
  prefs.reserve(m.n);
  for (std::size_t a = 0; a < m.n; ++a) {
    std::vector<AgentId> others;
    for (std::size_t b = 0; b < m.n; ++b)
      if (b != a && rng.bernoulli(m.density)) others.push_back(agent_id(b));
    prefs.push_back(detail::random_order(agent_id(a), std::move(others), m.model, m.tie, m.edge, rng));
  }
  return HousingMarket(default_names(m.n), std::move(prefs));
}

// A random (p, q)-improvement of q's order, possibly equal to it. Weak orders
// stay weak (p moves up to, or into, an earlier class); other orders get a
// random downward-closed set below p and upward-closed set above it.
inline PreferencePoset random_pq_improvement(const PreferencePoset& before, AgentId p, SplitMix64& rng,
                                            bool allow_new_acceptable = true) {
  const AgentId q = before.owner();
  if (q == p) return before;
  const bool had_p = before.accepts(p);
  if (!had_p && !(allow_new_acceptable && rng.bernoulli(0.5))) return before;

  PreferencePoset after = before;
  if (auto classes = before.tie_classes()) {
    const bool strict = before.is_strict_order();
    std::size_t current = 0;  // class index of p, or of the own house
    for (std::size_t c = 0; c < classes->size(); ++c)
      for (AgentId h : (*classes)[c])
        if (h == (had_p ? p : q)) current = c;
    const bool alone = had_p && (*classes)[current].size() == 1;
    // Classes without p: those before `current` keep their index.
    const std::size_t target = rng.below(current + 1);
    bool tie = !strict && target < current + (alone ? 0 : 1) && rng.bernoulli(0.5);
    if (!had_p && target == current) tie = false;
    after = move_in_weak_order(before, p, target, tie);
  } else {
    std::vector<AgentId> rest;
    for (AgentId h : before.acceptable())
      if (h != p) rest.push_back(h);
    std::vector<AgentId> up_allowed, up, below;
    for (AgentId y : rest)
      if (had_p ? before.less(p, y) : before.less(q, y)) up_allowed.push_back(y);
    // Random upward-closed subset of the houses p was below.
    for (AgentId y : up_allowed)
      if (rng.bernoulli(0.5)) up.push_back(y);
    for (std::size_t i = 0; i < up.size(); ++i)
      for (AgentId y : up_allowed)
        if (before.less(up[i], y) && std::find(up.begin(), up.end(), y) == up.end()) up.push_back(y);
    // Houses kept below p plus a random downward-closed extension among
    // houses that lie below all of `up`.
    for (AgentId x : rest) {
      bool fixed = had_p && before.less(x, p);
      bool can = std::find(up.begin(), up.end(), x) == up.end() &&
                 std::all_of(up.begin(), up.end(), [&](AgentId y) { return before.less(x, y); });
      if (fixed || (can && rng.bernoulli(0.4))) below.push_back(x);
    }
    for (std::size_t i = 0; i < below.size(); ++i)
      for (AgentId x : rest)
        if (before.less(x, below[i]) && std::find(below.begin(), below.end(), x) == below.end())
          below.push_back(x);
    std::vector<AgentId> acceptable(before.acceptable().begin(), before.acceptable().end());
    if (!had_p) acceptable.push_back(p);
    std::vector<std::pair<AgentId, AgentId>> rel;
    for (AgentId x : rest)
      for (AgentId y : rest)
        if (before.less(x, y)) rel.emplace_back(x, y);
    for (AgentId x : below) rel.emplace_back(x, p);
    for (AgentId y : up) rel.emplace_back(p, y);
    after = PreferencePoset::build(q, std::move(acceptable), rel);
  }
  if (auto why = pq_improvement_violation(before, after, p))
    throw std::logic_error("random_pq_improvement produced a non-improvement: " + *why);
  return after;
}

// A random p-improvement: each other agent is changed with probability
// `q_prob`; agents whose draw is a no-op stay out of the step list.
inline ImprovementSpec random_improvement(const HousingMarket& h, AgentId p, SplitMix64& rng,
                                          double q_prob = 0.5, bool allow_new_acceptable = true) {
  ImprovementSpec spec{p, {}};
  for (std::size_t i = 0; i < h.agent_count(); ++i) {
    AgentId q = agent_id(i);
    if (q == p || !rng.bernoulli(q_prob)) continue;
    PreferencePoset next = random_pq_improvement(h.prefs(q), p, rng, allow_new_acceptable);
    if (!(next == h.prefs(q))) spec.steps.push_back({q, std::move(next)});
  }
  return spec;
}

// Symmetric acceptability with edge probability `density`, independent
// uniformly random strict lists.
inline RoommatesInstance gen_random_roommates(std::size_t n, double density, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::vector<AgentId>> nb(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (rng.bernoulli(density)) {
        nb[a].push_back(agent_id(b));
        nb[b].push_back(agent_id(a));
      }
  std::vector<std::vector<std::vector<AgentId>>> lists(n);
  for (std::size_t a = 0; a < n; ++a) {
    rng.shuffle(nb[a]);
    for (AgentId b : nb[a]) lists[a].push_back({b});
  }
  return RoommatesInstance::from_lists(default_names(n), lists);
}

// Moves p up in q's strict list to a uniformly chosen better position.
// Returns nullopt if q does not accept p or already ranks p first.
inline std::optional<RoommatesInstance> random_roommates_improvement(const RoommatesInstance& h, AgentId p,
                                                                     AgentId q, SplitMix64& rng) {
  if (!h.accepts(q, p)) return std::nullopt;
  std::uint32_t r = h.rank(q, p);
  if (r == 0) return std::nullopt;
  auto cls = h.classes(q);
  cls.erase(cls.begin() + r);
  std::size_t to = rng.below(r);
  cls.insert(cls.begin() + static_cast<std::ptrdiff_t>(to), std::vector<AgentId>{p});
  return h.with_list(q, cls);
}

// Weak-order market for timing: every agent accepts 8 to 10 other houses,
// in tie classes of one to three. n is picked so |H| lands near `target`.
inline HousingMarket gen_scaling_market(std::size_t target, std::uint64_t seed) {
  auto build = [&](std::size_t n) {
    SplitMix64 rng(seed);
    std::vector<PreferencePoset> prefs;
    prefs.reserve(n);
    std::vector<AgentId> others;
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t k = std::min<std::size_t>(n - 1, 8 + rng.below(3));
      others.clear();
      while (others.size() < k) {
        AgentId b = agent_id(rng.below(n));
        if (index(b) != a && std::find(others.begin(), others.end(), b) == others.end()) others.push_back(b);
      }
      std::vector<std::vector<AgentId>> classes;
      for (std::size_t i = 0; i < others.size();) {
        std::size_t len = std::min<std::size_t>(others.size() - i, 1 + rng.below(3));
        classes.emplace_back(others.begin() + static_cast<std::ptrdiff_t>(i),
                             others.begin() + static_cast<std::ptrdiff_t>(i + len));
        i += len;
      }
      prefs.push_back(PreferencePoset::from_classes(agent_id(a), classes));
    }
    return HousingMarket(default_names(n), std::move(prefs));
  };
  std::size_t n = std::max<std::size_t>(12, target / 24);
  HousingMarket pilot = build(n);
  n = std::max<std::size_t>(12, static_cast<std::size_t>(static_cast<double>(n) * static_cast<double>(target) /
                                                         static_cast<double>(pilot.description_size())));
  return build(n);
}

// p promoted to a singleton top class by every agent that accepts her.
inline HousingMarket promote_everywhere(const HousingMarket& h, AgentId p) {
  std::vector<PreferencePoset> prefs;
  prefs.reserve(h.agent_count());
  for (std::size_t i = 0; i < h.agent_count(); ++i) {
    const PreferencePoset& pr = h.prefs(agent_id(i));
    if (agent_id(i) != p && pr.accepts(p) && pr.is_weak_order())
      prefs.push_back(move_in_weak_order(pr, p, 0, false));
    else
      prefs.push_back(pr);
  }
  return HousingMarket(h.names(), std::move(prefs));
}

// Timing input for hm_improve: a scaling market H, its TTC allocation X, and
// an agent p whose promotion by everyone who accepts her blocks X, so that
// there is real repair work to do. Agents left holding their own house are
// tried first; they are the ones most likely to close an envy cycle.
struct ScalingCase {
  HousingMarket h;
  HousingMarket h2;
  AgentId p;
  Allocation x;
};

inline ScalingCase scaling_case(std::size_t target, std::uint64_t seed, std::size_t max_tries = 500) {
  HousingMarket h = gen_scaling_market(target, seed);
  Allocation x = ttc(h);
  std::vector<AgentId> order;
  for (std::size_t a = 0; a < h.agent_count(); ++a)
    if (x[agent_id(a)] == agent_id(a)) order.push_back(agent_id(a));
  for (std::size_t a = 0; a < h.agent_count(); ++a)
    if (x[agent_id(a)] != agent_id(a)) order.push_back(agent_id(a));
  if (order.size() > max_tries) order.resize(max_tries);
  for (AgentId p : order) {
    HousingMarket h2 = promote_everywhere(h, p);
    if (!check_core(h2, x).in_core()) return {std::move(h), std::move(h2), p, std::move(x)};
  }
  throw Error(ErrorCode::BadParams, "no agent whose promotion blocks the TTC allocation");
}

}  // namespace coremarket

#endif  // COREMARKET_RANDOM_HPP
