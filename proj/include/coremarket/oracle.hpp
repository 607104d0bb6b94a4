#ifndef COREMARKET_ORACLE_HPP
#define COREMARKET_ORACLE_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "coremarket/allocation.hpp"
#include "coremarket/error.hpp"
#include "coremarket/improvement.hpp"
#include "coremarket/market.hpp"
#include "coremarket/poset.hpp"

namespace coremarket {

struct OracleOptions {
  // Largest market the oracle accepts; 0 picks default_oracle_cap().
  std::size_t cap = 0;
  // Worker threads for the top-level branches. Results do not depend on it.
  unsigned threads = 1;
  // Also filter the core down to the strict core.
  bool strict_core = false;
};

// log2 of the product of out-degrees of G^H, an upper bound on the number of
// allocations.
inline double allocation_count_bound_log2(const HousingMarket& h) {
  double bits = 0;
  for (std::size_t a = 0; a < h.agent_count(); ++a)
    bits += std::log2(static_cast<double>(h.prefs(agent_id(a)).acceptable_count()));
  return bits;
}

// 12 agents in general; up to 24 when the allocation count bound stays below
// 2^48, which is what the sparse reduction gadgets look like.
inline std::size_t default_oracle_cap(const HousingMarket& h) {
  return allocation_count_bound_log2(h) <= 48.0 ? 24 : 12;
}

struct CoreSummary {
  std::vector<Allocation> core;         // in enumeration order
  std::vector<Allocation> strict_core;  // only with OracleOptions::strict_core
  // Per agent: maximal / minimal houses she gets over the core (by ordinal).
  std::vector<std::vector<AgentId>> best;
  std::vector<std::vector<AgentId>> worst;
  std::size_t opt = 0;  // most trading agents in a core allocation
  Allocation opt_witness;
  std::size_t allocations_examined = 0;
};

namespace detail {

// Depth-first enumeration of all cycle covers of G^H. Agent i picks its
// house at depth i; a branch dies as soon as some untaken house has no
// unassigned agent left that accepts it.
class CoverEnumerator {
 public:
  explicit CoverEnumerator(const HousingMarket& h) : h_(h), n_(h.agent_count()) {
    above_.resize(n_);
    for (std::size_t a = 0; a < n_; ++a) {
      const PreferencePoset& p = h.prefs(agent_id(a));
      above_[a].resize(p.acceptable_count());
      for (std::size_t j = 0; j < p.acceptable_count(); ++j) {
        std::uint64_t mask = 0;
        p.for_each_above(static_cast<PreferencePoset::Local>(j),
                         [&](PreferencePoset::Local k) { mask |= std::uint64_t{1} << index(p.house(k)); });
        above_[a][j] = mask;
      }
    }
  }

  std::size_t branch_count() const { return h_.prefs(agent_id(0)).acceptable_count(); }

  // Enumerates covers whose first agent takes its `branch`-th acceptable
  // house; collects those in the core.
  void run_branch(std::size_t branch, std::vector<std::vector<AgentId>>& core,
                  std::size_t& examined) const {
    Frame f;
    f.target.assign(n_, kNoAgent);
    f.local.assign(n_, 0);
    f.taken.assign(n_, 0);
    f.avail.assign(n_, 0);
    for (std::size_t a = 0; a < n_; ++a)
      for (AgentId b : h_.prefs(agent_id(a)).acceptable()) ++f.avail[index(b)];
    if (!assign(f, 0, static_cast<PreferencePoset::Local>(branch))) return;
    recurse(f, 1, core, examined);
  }

 private:
  struct Frame {
    std::vector<AgentId> target;
    std::vector<PreferencePoset::Local> local;
    std::vector<char> taken;
    std::vector<std::uint32_t> avail;
  };

  bool assign(Frame& f, std::size_t a, PreferencePoset::Local j) const {
    const PreferencePoset& p = h_.prefs(agent_id(a));
    AgentId b = p.house(j);
    if (f.taken[index(b)]) return false;
    f.target[a] = b;
    f.local[a] = j;
    f.taken[index(b)] = 1;
    bool ok = true;
    for (AgentId c : p.acceptable()) {
      if (--f.avail[index(c)] == 0 && !f.taken[index(c)]) ok = false;
    }
    if (!ok) unassign(f, a);
    return ok;
  }

  void unassign(Frame& f, std::size_t a) const {
    for (AgentId c : h_.prefs(agent_id(a)).acceptable()) ++f.avail[index(c)];
    f.taken[index(f.target[a])] = 0;
    f.target[a] = kNoAgent;
  }

  void recurse(Frame& f, std::size_t depth, std::vector<std::vector<AgentId>>& core,
               std::size_t& examined) const {
    if (depth == n_) {
      ++examined;
      if (acyclic_envy(f)) core.push_back(f.target);
      return;
    }
    const std::size_t k = h_.prefs(agent_id(depth)).acceptable_count();
    for (std::size_t j = 0; j < k; ++j) {
      if (!assign(f, depth, static_cast<PreferencePoset::Local>(j))) continue;
      recurse(f, depth + 1, core, examined);
      unassign(f, depth);
    }
  }

  bool acyclic_envy(const Frame& f) const {
    std::uint64_t remaining = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
    bool progress = true;
    while (remaining && progress) {
      progress = false;
      for (std::uint64_t r = remaining; r; r &= r - 1) {
        std::size_t v = static_cast<std::size_t>(std::countr_zero(r));
        if ((above_[v][f.local[v]] & remaining) == 0) {
          remaining &= ~(std::uint64_t{1} << v);
          progress = true;
        }
      }
    }
    return remaining == 0;
  }

  const HousingMarket& h_;
  std::size_t n_;
  std::vector<std::vector<std::uint64_t>> above_;
};

inline void check_oracle_size(const HousingMarket& h, const OracleOptions& options) {
  std::size_t cap = options.cap != 0 ? options.cap : default_oracle_cap(h);
  cap = std::min<std::size_t>(cap, 64);
  if (h.agent_count() > cap)
    throw Error(ErrorCode::TooLarge, "market has " + std::to_string(h.agent_count()) +
                                         " agents; the oracle cap is " + std::to_string(cap));
}

}  // namespace detail

// All core allocations of a small market, by exhaustive enumeration.
inline CoreSummary enumerate_core(const HousingMarket& h, OracleOptions options = {}) {
  detail::check_oracle_size(h, options);
  const std::size_t n = h.agent_count();
  detail::CoverEnumerator e(h);
  const std::size_t branches = e.branch_count();
  std::vector<std::vector<std::vector<AgentId>>> per_branch(branches);
  std::vector<std::size_t> examined(branches, 0);

  unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(branches)));
  if (threads == 1) {
    for (std::size_t b = 0; b < branches; ++b) e.run_branch(b, per_branch[b], examined[b]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b; (b = next.fetch_add(1)) < branches;) e.run_branch(b, per_branch[b], examined[b]);
      });
    }
    for (auto& t : pool) t.join();
  }

  CoreSummary s;
  for (std::size_t b = 0; b < branches; ++b) {
    s.allocations_examined += examined[b];
    for (auto& t : per_branch[b]) s.core.emplace_back(std::move(t));
  }
  if (s.core.empty()) throw Error(ErrorCode::EmptyCore, "no core allocation found");

  std::vector<std::vector<AgentId>> obtained(n);
  for (const Allocation& x : s.core) {
    for (std::size_t a = 0; a < n; ++a) obtained[a].push_back(x[agent_id(a)]);
    if (x.trading_count() > s.opt || s.opt_witness.agent_count() == 0) {
      s.opt = x.trading_count();
      s.opt_witness = x;
    }
    if (options.strict_core && check_strict_core(h, x).in_core()) s.strict_core.push_back(x);
  }
  s.best.resize(n);
  s.worst.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto& got = obtained[a];
    std::sort(got.begin(), got.end());
    got.erase(std::unique(got.begin(), got.end()), got.end());
    const PreferencePoset& p = h.prefs(agent_id(a));
    for (AgentId x : got) {
      bool dominated = false, dominating = false;
      for (AgentId y : got) {
        dominated |= p.less(x, y);
        dominating |= p.less(y, x);
      }
      if (!dominated) s.best[a].push_back(x);
      if (!dominating) s.worst[a].push_back(x);
    }
  }
  return s;
}

inline void require_arc(const HousingMarket& h, AgentId a, AgentId b) {
  if (index(a) >= h.agent_count() || index(b) >= h.agent_count())
    throw Error(ErrorCode::UnknownAgent, "arc endpoint is not an agent");
  if (!h.prefs(a).accepts(b))
    throw Error(ErrorCode::NoSuchArc, "'" + h.name(a) + "' does not accept '" + h.name(b) + "'");
}

// Some core allocation contains the arc (a, b).
inline bool arc_in_core(const HousingMarket& h, AgentId a, AgentId b, OracleOptions options = {}) {
  require_arc(h, a, b);
  auto s = enumerate_core(h, options);
  return std::any_of(s.core.begin(), s.core.end(), [&](const Allocation& x) { return x[a] == b; });
}

// Some core allocation avoids the arc (a, b).
inline bool forbidden_arc_in_core(const HousingMarket& h, AgentId a, AgentId b,
                                  OracleOptions options = {}) {
  require_arc(h, a, b);
  auto s = enumerate_core(h, options);
  return std::any_of(s.core.begin(), s.core.end(), [&](const Allocation& x) { return x[a] != b; });
}

// Some core allocation lets a trade.
inline bool agent_trading(const HousingMarket& h, AgentId a, OracleOptions options = {}) {
  if (index(a) >= h.agent_count()) throw Error(ErrorCode::UnknownAgent, "not an agent");
  auto s = enumerate_core(h, options);
  return std::any_of(s.core.begin(), s.core.end(), [&](const Allocation& x) { return x[a] != a; });
}

inline std::pair<std::size_t, Allocation> max_core(const HousingMarket& h,
                                                   OracleOptions options = {}) {
  auto s = enumerate_core(h, options);
  return {s.opt, s.opt_witness};
}

enum class StrictImprovementKind { PSIB, NSIB, PSIW, NSIW };

// Compares p's best (B) or worst (W) core houses before and after the
// improvement: "possibly" (P) asks for some pair a, a' with a ≺_p a',
// "necessarily" (N) for all pairs.
inline bool strict_improvement_decide(StrictImprovementKind kind, const HousingMarket& h,
                                      const HousingMarket& h2, AgentId p,
                                      OracleOptions options = {}) {
  require_same_agents(h, h2);
  if (index(p) >= h.agent_count()) throw Error(ErrorCode::UnknownAgent, "p is not an agent");
  if (auto why = p_improvement_violation(h, h2, p))
    throw Error(ErrorCode::NotAnImprovement, *why);
  auto before = enumerate_core(h, options);
  auto after = enumerate_core(h2, options);
  const bool best = kind == StrictImprovementKind::PSIB || kind == StrictImprovementKind::NSIB;
  const auto& xs = best ? before.best[index(p)] : before.worst[index(p)];
  const auto& ys = best ? after.best[index(p)] : after.worst[index(p)];
  if (xs.empty() || ys.empty()) throw Error(ErrorCode::EmptyCore, "no core house for p");
  const PreferencePoset& pp = h.prefs(p);
  const bool possibly = kind == StrictImprovementKind::PSIB || kind == StrictImprovementKind::PSIW;
  for (AgentId a : xs) {
    for (AgentId b : ys) {
      bool better = pp.less(a, b);
      if (possibly && better) return true;
      if (!possibly && !better) return false;
    }
  }
  return !possibly;
}

}  // namespace coremarket

#endif  // COREMARKET_ORACLE_HPP
