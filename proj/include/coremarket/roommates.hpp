#ifndef COREMARKET_ROOMMATES_HPP
#define COREMARKET_ROOMMATES_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coremarket/error.hpp"
#include "coremarket/improvement.hpp"
#include "coremarket/market.hpp"
#include "coremarket/poset.hpp"

namespace coremarket {

// A housing market read as a Stable Roommates instance: weak-order
// preferences, own house strictly last, acceptability symmetric.
class RoommatesInstance {
 public:
  static constexpr std::uint32_t kUnacceptable = UINT32_MAX;

  explicit RoommatesInstance(HousingMarket h) : market_(std::move(h)) {
    const std::size_t n = market_.agent_count();
    classes_.resize(n);
    order_.resize(n);
    ranks_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      const AgentId self = agent_id(a);
      auto cls = market_.prefs(self).tie_classes();
      if (!cls)
        throw Error(ErrorCode::InvalidInstance,
                    "preferences of '" + market_.name(self) + "' are not a weak order");
      if (cls->back() != std::vector<AgentId>{self})
        throw Error(ErrorCode::InvalidInstance,
                    "'" + market_.name(self) + "' must rank her own house strictly last");
      cls->pop_back();
      for (std::size_t r = 0; r < cls->size(); ++r) {
        auto& c = (*cls)[r];
        std::sort(c.begin(), c.end());
        for (AgentId b : c) {
          order_[a].push_back(b);
          ranks_[a].emplace_back(b, static_cast<std::uint32_t>(r));
        }
      }
      std::sort(ranks_[a].begin(), ranks_[a].end());
      classes_[a] = std::move(*cls);
    }
    for (std::size_t a = 0; a < n; ++a)
      for (AgentId b : order_[a])
        if (!accepts(b, agent_id(a)))
          throw Error(ErrorCode::InvalidInstance, "'" + market_.name(agent_id(a)) + "' accepts '" +
                                                      market_.name(b) + "' but not vice versa");
  }

  // Lists best first, one tie class per inner vector; own house implicit.
  static RoommatesInstance from_lists(std::vector<std::string> names,
                                      const std::vector<std::vector<std::vector<AgentId>>>& lists) {
    std::vector<PreferencePoset> prefs;
    for (std::size_t a = 0; a < names.size(); ++a)
      prefs.push_back(PreferencePoset::from_classes(agent_id(a), lists[a], &names));
    return RoommatesInstance(HousingMarket(std::move(names), std::move(prefs)));
  }

  const HousingMarket& market() const { return market_; }
  std::size_t agent_count() const { return market_.agent_count(); }
  const std::string& name(AgentId a) const { return market_.name(a); }

  // Acceptable partners, best first; ties in ordinal order.
  const std::vector<AgentId>& list(AgentId a) const { return order_[index(a)]; }
  const std::vector<std::vector<AgentId>>& classes(AgentId a) const { return classes_[index(a)]; }

  // Tie-class index of b for a. a itself ranks below every partner;
  // unacceptable agents get kUnacceptable.
  std::uint32_t rank(AgentId a, AgentId b) const {
    if (a == b) return static_cast<std::uint32_t>(classes_[index(a)].size());
    const auto& r = ranks_[index(a)];
    auto it = std::lower_bound(r.begin(), r.end(), std::make_pair(b, std::uint32_t{0}));
    return it != r.end() && it->first == b ? it->second : kUnacceptable;
  }
  bool accepts(AgentId a, AgentId b) const { return a != b && rank(a, b) != kUnacceptable; }

  bool is_strict() const {
    for (const auto& cls : classes_)
      for (const auto& c : cls)
        if (c.size() > 1) return false;
    return true;
  }

  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& l : order_) m += l.size();
    return m / 2;
  }

  // Copy with a's list replaced (best first, tie classes).
  RoommatesInstance with_list(AgentId a, const std::vector<std::vector<AgentId>>& cls) const {
    return RoommatesInstance(
        market_.with_preferences(a, PreferencePoset::from_classes(a, cls, &market_.names())));
  }

  // Copy where q keeps only partners she ranks strictly better than class
  // `keep_below`; the dropped agents lose q as well.
  RoommatesInstance truncated(AgentId q, std::uint32_t keep_below) const {
    const std::size_t n = agent_count();
    std::vector<std::vector<std::vector<AgentId>>> lists(n);
    for (std::size_t a = 0; a < n; ++a) lists[a] = classes_[a];
    auto& lq = lists[index(q)];
    std::vector<AgentId> dropped;
    for (std::size_t r = keep_below; r < lq.size(); ++r)
      dropped.insert(dropped.end(), lq[r].begin(), lq[r].end());
    if (keep_below < lq.size()) lq.resize(keep_below);
    for (AgentId d : dropped)
      for (auto& c : lists[index(d)]) c.erase(std::remove(c.begin(), c.end(), q), c.end());
    return from_lists(market_.names(), lists);
  }

 private:
  HousingMarket market_;
  std::vector<std::vector<std::vector<AgentId>>> classes_;
  std::vector<std::vector<AgentId>> order_;
  std::vector<std::vector<std::pair<AgentId, std::uint32_t>>> ranks_;
};

// partner[a] == a means a is unmatched.
class Matching {
 public:
  Matching() = default;
  explicit Matching(std::size_t n) : partner_(n) {
    for (std::size_t i = 0; i < n; ++i) partner_[i] = agent_id(i);
  }

  std::size_t agent_count() const { return partner_.size(); }
  AgentId operator[](AgentId a) const { return partner_[index(a)]; }
  bool matched(AgentId a) const { return partner_[index(a)] != a; }

  void match(AgentId a, AgentId b) {
    partner_[index(a)] = b;
    partner_[index(b)] = a;
  }
  void unmatch(AgentId a) {
    AgentId b = partner_[index(a)];
    partner_[index(a)] = a;
    partner_[index(b)] = b;
  }

  // Pairs (a, b) with a < b, by a.
  std::vector<std::pair<AgentId, AgentId>> pairs() const {
    std::vector<std::pair<AgentId, AgentId>> out;
    for (std::size_t i = 0; i < partner_.size(); ++i)
      if (index(partner_[i]) > i) out.emplace_back(agent_id(i), partner_[i]);
    return out;
  }
  std::size_t size() const { return pairs().size(); }

  friend bool operator==(const Matching&, const Matching&) = default;
  friend auto operator<=>(const Matching&, const Matching&) = default;

 private:
  std::vector<AgentId> partner_;
};

inline void validate_matching(const RoommatesInstance& inst, const Matching& m) {
  if (m.agent_count() != inst.agent_count())
    throw Error(ErrorCode::InvalidMatching, "matching covers a different number of agents");
  for (std::size_t i = 0; i < m.agent_count(); ++i) {
    AgentId a = agent_id(i), b = m[a];
    if (index(b) >= m.agent_count() || m[b] != a)
      throw Error(ErrorCode::InvalidMatching, "partner relation is not symmetric at '" + inst.name(a) + "'");
    if (b != a && !inst.accepts(a, b))
      throw Error(ErrorCode::InvalidMatching,
                  "'" + inst.name(a) + "' does not accept '" + inst.name(b) + "'");
  }
}

struct StabilityVerdict {
  std::optional<std::pair<AgentId, AgentId>> blocking;  // a < b
  bool stable() const { return !blocking.has_value(); }
};

namespace detail {

// Scans edges {a, b}, a < b, in ordinal order and returns the first one
// `blocks` accepts. Agents flagged in `skip` are treated as absent.
template <class F>
StabilityVerdict first_blocking(const RoommatesInstance& inst, const std::vector<char>* skip, F&& blocks) {
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    AgentId a = agent_id(i);
    if (skip && (*skip)[i]) continue;
    std::vector<AgentId> nb(inst.list(a).begin(), inst.list(a).end());
    std::sort(nb.begin(), nb.end());
    for (AgentId b : nb) {
      if (index(b) <= i || (skip && (*skip)[index(b)])) continue;
      if (blocks(a, b)) return {std::make_pair(a, b)};
    }
  }
  return {};
}

}  // namespace detail

// A pair blocks if both strictly prefer each other to their current state.
inline StabilityVerdict check_stable(const RoommatesInstance& inst, const Matching& m,
                                     const std::vector<char>* absent = nullptr) {
  return detail::first_blocking(inst, absent, [&](AgentId a, AgentId b) {
    return m[a] != b && inst.rank(a, b) < inst.rank(a, m[a]) && inst.rank(b, a) < inst.rank(b, m[b]);
  });
}

// Weakly blocking pair {a, b} not in M: each side is unmatched or weakly
// prefers the other to its partner, and when both are matched at least one
// preference is strict.
inline StabilityVerdict check_strongly_stable(const RoommatesInstance& inst, const Matching& m) {
  return detail::first_blocking(inst, nullptr, [&](AgentId a, AgentId b) {
    if (m[a] == b) return false;
    std::uint32_t ra = inst.rank(a, b), rb = inst.rank(b, a);
    std::uint32_t ca = inst.rank(a, m[a]), cb = inst.rank(b, m[b]);
    if (ra > ca || rb > cb) return false;
    if (m.matched(a) && m.matched(b)) return ra < ca || rb < cb;
    return true;
  });
}

namespace detail {

inline void require_strict(const RoommatesInstance& inst) {
  if (!inst.is_strict()) throw Error(ErrorCode::TiesPresent, "preferences must be strict");
}

// Preference table of the two-phase solver: per agent her list with
// deletion marks; pairs are always deleted from both sides.
class IrvingTable {
 public:
  explicit IrvingTable(const RoommatesInstance& inst) : inst_(inst) {
    const std::size_t n = inst.agent_count();
    alive_.resize(n);
    head_.assign(n, 0);
    tail_.resize(n);
    count_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      std::size_t k = inst.list(agent_id(a)).size();
      alive_[a].assign(k, 1);
      tail_[a] = k;
      count_[a] = k;
    }
  }

  std::optional<Matching> solve() {
    const std::size_t n = inst_.agent_count();
    // Phase 1: proposals, in ordinal order of the waiting agents.
    std::deque<std::uint32_t> free;
    for (std::size_t a = 0; a < n; ++a) free.push_back(static_cast<std::uint32_t>(a));
    std::vector<std::uint32_t> holds(n, UINT32_MAX);
    while (!free.empty()) {
      std::uint32_t x = free.front();
      free.pop_front();
      auto first = first_of(x);
      if (!first) continue;
      std::uint32_t y = *first;
      std::uint32_t previous = holds[y];
      holds[y] = x;
      truncate_after(y, x);
      if (previous != UINT32_MAX && previous != x) free.push_back(previous);
    }
    std::vector<char> phase1_nonempty(n);
    for (std::size_t a = 0; a < n; ++a) phase1_nonempty[a] = count_[a] > 0;

    // Phase 2: eliminate rotations while some list has two or more entries.
    for (;;) {
      std::size_t start = n;
      for (std::size_t a = 0; a < n && start == n; ++a)
        if (count_[a] >= 2) start = a;
      if (start == n) break;
      std::vector<std::uint32_t> xs, ys;
      std::vector<std::uint32_t> at(n, UINT32_MAX);
      std::uint32_t x = static_cast<std::uint32_t>(start);
      while (at[x] == UINT32_MAX) {
        at[x] = static_cast<std::uint32_t>(xs.size());
        auto y = second_of(x);
        if (!y) throw std::logic_error("rotation search reached a list of length one");
        xs.push_back(x);
        ys.push_back(*y);
        x = *last_of(*y);
      }
      for (std::size_t i = at[x]; i < xs.size(); ++i) truncate_after(ys[i], xs[i]);
      for (std::size_t a = 0; a < n; ++a)
        if (phase1_nonempty[a] && count_[a] == 0) return std::nullopt;
    }

    Matching m(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (count_[a] == 0) continue;
      std::uint32_t b = *first_of(static_cast<std::uint32_t>(a));
      if (*first_of(b) != a) return std::nullopt;
      m.match(agent_id(a), agent_id(b));
    }
    return m;
  }

 private:
  std::uint32_t at(std::uint32_t a, std::size_t i) const {
    return static_cast<std::uint32_t>(index(inst_.list(agent_id(a))[i]));
  }
  // Lists are strict, so the rank is the position.
  std::size_t position(std::uint32_t a, std::uint32_t b) const {
    return inst_.rank(agent_id(a), agent_id(b));
  }
  std::optional<std::uint32_t> first_of(std::uint32_t a) {
    auto& h = head_[a];
    while (h < alive_[a].size() && !alive_[a][h]) ++h;
    if (h == alive_[a].size()) return std::nullopt;
    return at(a, h);
  }
  std::optional<std::uint32_t> second_of(std::uint32_t a) {
    if (!first_of(a)) return std::nullopt;
    for (std::size_t i = head_[a] + 1; i < alive_[a].size(); ++i)
      if (alive_[a][i]) return at(a, i);
    return std::nullopt;
  }
  std::optional<std::uint32_t> last_of(std::uint32_t a) {
    auto& t = tail_[a];
    while (t > 0 && !alive_[a][t - 1]) --t;
    if (t == 0) return std::nullopt;
    return at(a, t - 1);
  }
  void erase(std::uint32_t a, std::uint32_t b) {
    std::size_t i = position(a, b), j = position(b, a);
    if (!alive_[a][i]) return;
    alive_[a][i] = 0;
    alive_[b][j] = 0;
    --count_[a];
    --count_[b];
  }
  // a drops everyone she ranks below b.
  void truncate_after(std::uint32_t a, std::uint32_t b) {
    const std::size_t keep = position(a, b) + 1;
    while (auto last = last_of(a)) {
      if (tail_[a] <= keep) break;
      erase(a, *last);
    }
  }

  const RoommatesInstance& inst_;
  std::vector<std::vector<char>> alive_;
  std::vector<std::size_t> head_, tail_, count_;
};

}  // namespace detail

// A stable matching if one exists (two-phase proposal and rotation
// elimination; all choices by lowest ordinal).
inline std::optional<Matching> find_stable(const RoommatesInstance& inst) {
  detail::require_strict(inst);
  return detail::IrvingTable(inst).solve();
}

// Alternating proposal/rejection walk from a matching that is stable once
// α0 is removed. Each step: the current α proposes to β, her favourite among
// agents that are free or prefer α to their partner; β's partner becomes the
// next α.
class ProposalRejectionSequence {
 public:
  enum class Status { Running, Stopped, Returned };

  ProposalRejectionSequence(const RoommatesInstance& inst, Matching start, AgentId alpha0)
      : inst_(inst), m_(std::move(start)), in_alpha_(inst.agent_count(), 0) {
    detail::require_strict(inst);
    if (m_.matched(alpha0))
      throw Error(ErrorCode::InvalidMatching, "the starting agent must be unmatched");
    alphas_.push_back(alpha0);
    in_alpha_[index(alpha0)] = 1;
  }

  Status status() const { return status_; }
  AgentId alpha() const { return alphas_.back(); }
  const std::vector<AgentId>& alphas() const { return alphas_; }
  const std::vector<AgentId>& betas() const { return betas_; }
  const Matching& matching() const { return m_; }
  // Agent at which the sequence stopped: the last β when she was free,
  // otherwise the last α.
  AgentId stopped_at() const { return stopped_at_; }

  Status step() {
    if (status_ != Status::Running) return status_;
    const AgentId a = alpha();
    std::optional<AgentId> beta;
    for (AgentId b : inst_.list(a)) {
      if (!m_.matched(b) || inst_.rank(b, a) < inst_.rank(b, m_[b])) {
        beta = b;
        break;
      }
    }
    if (!beta) {
      status_ = Status::Stopped;
      stopped_at_ = a;
      return status_;
    }
    betas_.push_back(*beta);
    if (in_alpha_[index(*beta)]) {
      status_ = Status::Returned;
      return status_;
    }
    if (!m_.matched(*beta)) {
      m_.match(a, *beta);
      status_ = Status::Stopped;
      stopped_at_ = *beta;
      return status_;
    }
    const AgentId next = m_[*beta];
    m_.unmatch(*beta);
    m_.match(a, *beta);
    alphas_.push_back(next);
    in_alpha_[index(next)] = 1;
    return status_;
  }

 private:
  const RoommatesInstance& inst_;
  Matching m_;
  std::vector<AgentId> alphas_;
  std::vector<AgentId> betas_;
  std::vector<char> in_alpha_;
  Status status_ = Status::Running;
  AgentId stopped_at_ = kNoAgent;
};

struct SrImproveOptions {
#ifdef NDEBUG
  bool check_invariants = false;
#else
  bool check_invariants = true;
#endif
  // A stable matching of H2 to use instead of running the solver. Any one
  // will do; passing one that leaves p worse off forces the proposal walk.
  const Matching* reference = nullptr;
};

struct SrImproveResult {
  enum class Route { Unchanged, Solver, Sequence };
  std::optional<Matching> matching;  // nullopt: no stable matching in H2
  Route route = Route::Unchanged;
  std::size_t sequence_steps = 0;
};

// Given M stable in H and a (p, q)-improvement H2 of H, a stable matching M'
// of H2 with M(p) ⪯_p M'(p), or nullopt when H2 has no stable matching.
inline SrImproveResult sr_improve_traced(const RoommatesInstance& h, const RoommatesInstance& h2,
                                         AgentId p, AgentId q, const Matching& m,
                                         SrImproveOptions options = {}) {
  require_same_agents(h.market(), h2.market());
  const std::size_t n = h.agent_count();
  if (index(p) >= n || index(q) >= n) throw Error(ErrorCode::UnknownAgent, "p or q is not an agent");
  detail::require_strict(h);
  detail::require_strict(h2);
  validate_matching(h, m);
  if (auto blocked = check_stable(h, m).blocking)
    throw Error(ErrorCode::NotStable, "matching is blocked in H by {" + h.name(blocked->first) + ", " +
                                          h.name(blocked->second) + "}");
  for (AgentId c : changed_agents(h.market(), h2.market()))
    if (c != q)
      throw Error(ErrorCode::NotAnImprovement, "agent '" + h.name(c) + "' changed but is not q");
  if (auto why = pq_improvement_violation(h.market().prefs(q), h2.market().prefs(q), p))
    throw Error(ErrorCode::NotAnImprovement, h.name(q) + ": " + *why);

  auto fail = [](const std::string& what) { throw std::logic_error("sr_improve: " + what); };
  auto check_output = [&](const Matching& out) {
    if (!check_stable(h2, out).stable()) fail("output is not stable in H2");
    if (h2.rank(p, out[p]) > h2.rank(p, m[p])) fail("p is worse off");
  };

  SrImproveResult res;
  if (check_stable(h2, m).stable()) {
    res.matching = m;
    return res;
  }
  std::optional<Matching> star;
  if (options.reference) {
    validate_matching(h2, *options.reference);
    if (!check_stable(h2, *options.reference).stable())
      throw Error(ErrorCode::NotStable, "reference matching is not stable in H2");
    star = *options.reference;
  } else {
    star = find_stable(h2);
  }
  res.route = SrImproveResult::Route::Solver;
  if (!star) return res;
  if (h2.rank(p, (*star)[p]) <= h2.rank(p, m[p])) {
    res.matching = std::move(star);
    return res;
  }

  // {p, q} blocks M in H2, so q is matched in M (else it would block in H).
  if (!m.matched(q)) fail("q is unmatched in M although {p, q} blocks");
  res.route = SrImproveResult::Route::Sequence;
  const RoommatesInstance tilde = h2.truncated(q, h2.rank(q, p));
  const AgentId alpha0 = m[q];
  Matching m0 = m;
  m0.unmatch(q);
  ProposalRejectionSequence seq(tilde, std::move(m0), alpha0);
  std::vector<char> absent(n, 0);
  for (;;) {
    if (options.check_invariants) {
      std::fill(absent.begin(), absent.end(), 0);
      absent[index(seq.alpha())] = 1;
      if (!check_stable(tilde, seq.matching(), &absent).stable())
        fail("induced matching is not stable without the current proposer");
    }
    if (seq.alphas().size() > 1 && seq.alpha() == p) {
      Matching out = seq.matching();
      if (out.matched(q)) fail("q is matched when the walk reaches p");
      out.match(p, q);
      check_output(out);
      res.matching = std::move(out);
      return res;
    }
    auto st = seq.step();
    ++res.sequence_steps;
    if (st == ProposalRejectionSequence::Status::Returned) fail("the sequence has a return");
    if (st == ProposalRejectionSequence::Status::Stopped) {
      if (seq.stopped_at() != q) fail("the sequence stopped somewhere other than q");
      check_output(seq.matching());
      res.matching = seq.matching();
      return res;
    }
  }
}

inline std::optional<Matching> sr_improve(const RoommatesInstance& h, const RoommatesInstance& h2,
                                          AgentId p, AgentId q, const Matching& m,
                                          SrImproveOptions options = {}) {
  return sr_improve_traced(h, h2, p, q, m, options).matching;
}

// Every matching of the acceptability graph, in lexicographic order of the
// partner vector choices (agent 0 first: unmatched, then partners by ordinal).
inline void for_each_matching(const RoommatesInstance& inst, const std::function<void(const Matching&)>& f) {
  const std::size_t n = inst.agent_count();
  std::vector<std::vector<AgentId>> nb(n);
  for (std::size_t a = 0; a < n; ++a) {
    nb[a] = inst.list(agent_id(a));
    std::sort(nb[a].begin(), nb[a].end());
  }
  Matching m(n);
  std::vector<char> done(n, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    while (i < n && done[i]) ++i;
    if (i == n) {
      f(m);
      return;
    }
    done[i] = 1;
    rec(i + 1);
    for (AgentId b : nb[i]) {
      if (done[index(b)]) continue;
      done[index(b)] = 1;
      m.match(agent_id(i), b);
      rec(i + 1);
      m.unmatch(agent_id(i));
      done[index(b)] = 0;
    }
    done[i] = 0;
  };
  rec(0);
}

inline std::vector<Matching> all_stable_matchings(const RoommatesInstance& inst) {
  std::vector<Matching> out;
  for_each_matching(inst, [&](const Matching& m) {
    if (check_stable(inst, m).stable()) out.push_back(m);
  });
  return out;
}

inline std::vector<Matching> all_strongly_stable_matchings(const RoommatesInstance& inst) {
  std::vector<Matching> out;
  for_each_matching(inst, [&](const Matching& m) {
    if (check_strongly_stable(inst, m).stable()) out.push_back(m);
  });
  return out;
}

}  // namespace coremarket

#endif  // COREMARKET_ROOMMATES_HPP
