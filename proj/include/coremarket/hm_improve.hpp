#ifndef COREMARKET_HM_IMPROVE_HPP
#define COREMARKET_HM_IMPROVE_HPP

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coremarket/allocation.hpp"
#include "coremarket/error.hpp"
#include "coremarket/improvement.hpp"
#include "coremarket/market.hpp"
#include "coremarket/poset.hpp"
#include "coremarket/ttc.hpp"

namespace coremarket {

struct HmImproveOptions {
  // Re-verify the working state after every iteration (sub-allocation degree
  // constraints, acyclic envy graph, monotone improvement) and the output
  // (core membership, no envy into the removed set). Costs O(|H|) per
  // iteration.
#ifdef NDEBUG
  bool check_invariants = false;
#else
  bool check_invariants = true;
#endif
};

struct HmImproveResult {
  Allocation allocation;
  bool unchanged = false;           // X was already in the core of H2
  std::vector<AgentId> shadowed;    // agents q that got a shadow copy
  std::vector<AgentId> irrelevant;  // original agents moved to R
  std::size_t iterations = 0;
  std::size_t iteration_bound = 0;  // |E| + |N| of the shadow market
};

namespace detail {

// Working state for repairing a core allocation after p improved.
//
// Vertices 0..n-1 are the agents; n+k is the shadow of the k-th shadowed
// agent q, which sits between q and p: q sees the shadow in place of p, and
// the shadow only wants p. Y is kept as out/in pointers. A vertex without an
// in-arc is a source (U), a shadow without an out-arc a sink (V).
class HmImprove {
 public:
  static constexpr std::uint32_t kNone = UINT32_MAX;
  using Local = PreferencePoset::Local;

  HmImprove(const HousingMarket& h2, AgentId p, const Allocation& x,
            const std::vector<AgentId>& shadowed, bool check)
      : h2_(h2), p_(static_cast<std::uint32_t>(index(p))), n_(h2.agent_count()),
        m_(shadowed.size()), check_(check) {
    const std::size_t total = n_ + m_;
    shadow_of_.assign(n_, kNone);
    owner_.resize(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      owner_[k] = static_cast<std::uint32_t>(index(shadowed[k]));
      shadow_of_[owner_[k]] = static_cast<std::uint32_t>(n_ + k);
    }

    // In-arcs by target, sources in increasing order. Loops never carry an
    // augmenting arc, and each (q, p) is replaced by (q, shadow) + (shadow, p).
    in_off_.assign(total + 1, 0);
    for (std::size_t t = 0; t < n_; ++t) {
      for (const InArc& e : h2.in_arcs(agent_id(t))) {
        std::uint32_t s = static_cast<std::uint32_t>(index(e.source));
        if (s == t || (t == p_ && shadow_of_[s] != kNone)) continue;
        in_src_.push_back(s);
        in_loc_.push_back(e.local);
      }
      if (t == p_) {
        for (std::size_t k = 0; k < m_; ++k) {
          in_src_.push_back(static_cast<std::uint32_t>(n_ + k));
          in_loc_.push_back(0);
        }
      }
      in_off_[t + 1] = static_cast<std::uint32_t>(in_src_.size());
    }
    for (std::size_t k = 0; k < m_; ++k) {
      in_src_.push_back(owner_[k]);
      in_loc_.push_back(h2.prefs(agent_id(owner_[k])).local_index(agent_id(p_)));
      in_off_[n_ + k + 1] = static_cast<std::uint32_t>(in_src_.size());
    }
    ptr_.assign(in_off_.begin(), in_off_.end() - 1);

    out_.assign(total, kNone);
    out_loc_.assign(total, 0);
    in_.assign(total, kNone);
    in_v_.assign(total, 0);
    in_r_.assign(total, 0);
    for (std::size_t a = 0; a < n_; ++a) {
      std::uint32_t t = static_cast<std::uint32_t>(index(x[agent_id(a)]));
      out_[a] = t;
      out_loc_[a] = h2.prefs(agent_id(a)).local_index(agent_id(t));
      in_[t] = static_cast<std::uint32_t>(a);
    }
    for (std::size_t k = 0; k < m_; ++k) {
      std::uint32_t q = owner_[k], sh = static_cast<std::uint32_t>(n_ + k);
      in_[out_[q]] = kNone;
      out_[q] = sh;
      out_loc_[q] = h2.prefs(agent_id(q)).local_index(agent_id(p_));
      in_[sh] = q;
      in_v_[sh] = 1;
    }
    for (std::size_t v = 0; v < total; ++v)
      if (in_[v] == kNone) {
        active_.insert(static_cast<std::uint32_t>(v));
        ++sources_outside_v_;
      }
    bound_ = h2.arc_count() + 2 * m_ + total;
  }

  std::size_t iteration_bound() const { return bound_; }
  std::size_t iterations() const { return iterations_; }

  void run() {
    if (check_) verify_state();
    while (sources_outside_v_ > 0) {
      if (++iterations_ > bound_) throw std::logic_error("hm_improve: iteration bound exceeded");
      std::uint32_t u = kNone, s = kNone;
      while (!active_.empty()) {
        std::uint32_t cand = *active_.begin();
        s = first_augmenting_in(cand);
        if (s != kNone) {
          u = cand;
          break;
        }
        active_.erase(active_.begin());
        dead_.insert(cand);
      }
      if (u != kNone) {
        if (!in_v_[s]) {
          // s trades up to u; its old house becomes a source.
          std::uint32_t old = out_[s];
          Local old_loc = out_loc_[s];
          set_arc(s, u);
          in_[old] = kNone;
          add_source(old);
          if (check_ && !h2_.prefs(agent_id(s)).less_local(old_loc, out_loc_[s]))
            throw std::logic_error("hm_improve: an agent did not improve");
        } else {
          // A sink shadow takes p: one source and one sink disappear.
          set_arc(s, u);
          in_v_[s] = 0;
          if (in_[s] == kNone) ++sources_outside_v_;
        }
      } else {
        // Nothing augments into U: drop its lowest vertex into R.
        u = *dead_.begin();
        if (u == p_) throw std::logic_error("hm_improve: p became irrelevant");
        dead_.erase(dead_.begin());
        in_r_[u] = 1;
        if (in_v_[u]) {
          in_v_[u] = 0;
        } else {
          --sources_outside_v_;
          std::uint32_t next = out_[u];
          out_[u] = kNone;
          in_[next] = kNone;
          add_source(next);
        }
      }
      if (check_) verify_state();
    }
    if (check_) verify_no_envy_into_r();
  }

  // Output assembly: TTC on the irrelevant agents, Y elsewhere with each
  // q -> shadow -> p path spliced into q -> p.
  std::vector<AgentId> assemble(std::vector<AgentId>& irrelevant) const {
    std::size_t live_shadows = 0;
    for (std::size_t k = 0; k < m_; ++k) {
      std::uint32_t sh = static_cast<std::uint32_t>(n_ + k);
      if (!in_r_[sh] && in_[sh] != kNone) ++live_shadows;
    }
    if (live_shadows > 1) throw std::logic_error("hm_improve: more than one shadow in use");

    irrelevant.clear();
    for (std::size_t a = 0; a < n_; ++a)
      if (in_r_[a]) irrelevant.push_back(agent_id(a));
    Allocation xr = ttc_restricted(h2_, irrelevant);
    std::vector<AgentId> target(n_);
    for (std::size_t a = 0; a < n_; ++a) {
      if (in_r_[a]) {
        target[a] = xr[agent_id(a)];
      } else {
        std::uint32_t t = out_[a];
        target[a] = agent_id(t >= n_ ? p_ : t);
      }
    }
    return target;
  }

 private:
  bool augmenting(std::uint32_t s, Local target_loc) const {
    if (s >= n_) return in_v_[s] != 0;
    return h2_.prefs(agent_id(s)).less_local(out_loc_[s], target_loc);
  }

  // Lowest-ordinal source of an augmenting arc into t. Arcs only ever stop
  // being augmenting (Y(s) improves, a shadow leaves V, a vertex joins R),
  // so the scan position never moves back.
  std::uint32_t first_augmenting_in(std::uint32_t t) {
    for (; ptr_[t] < in_off_[t + 1]; ++ptr_[t]) {
      std::uint32_t s = in_src_[ptr_[t]];
      if (!in_r_[s] && augmenting(s, in_loc_[ptr_[t]])) return s;
    }
    return kNone;
  }

  void set_arc(std::uint32_t s, std::uint32_t u) {
    out_[s] = u;
    if (s < n_) {
      out_loc_[s] = u >= n_ ? h2_.prefs(agent_id(s)).local_index(agent_id(p_))
                            : h2_.prefs(agent_id(s)).local_index(agent_id(u));
    }
    in_[u] = s;
    active_.erase(u);
    if (!in_v_[u]) --sources_outside_v_;
  }

  void add_source(std::uint32_t v) {
    active_.insert(v);
    if (!in_v_[v]) ++sources_outside_v_;
  }

  void verify_state() const {
    const std::size_t total = n_ + m_;
    std::size_t sources = 0, sinks = 0;
    for (std::size_t v = 0; v < total; ++v) {
      if (in_r_[v]) continue;
      if (in_v_[v] && v < n_) throw std::logic_error("hm_improve: an agent became a sink");
      if (in_v_[v] != (out_[v] == kNone))
        throw std::logic_error("hm_improve: out-degree constraint violated");
      if (out_[v] != kNone && (in_r_[out_[v]] || in_[out_[v]] != v))
        throw std::logic_error("hm_improve: arc bookkeeping inconsistent");
      if (in_[v] == kNone) {
        ++sources;
        if (!active_.count(static_cast<std::uint32_t>(v)) && !dead_.count(static_cast<std::uint32_t>(v)))
          throw std::logic_error("hm_improve: source not tracked");
      }
      sinks += in_v_[v];
    }
    if (sources != sinks) throw std::logic_error("hm_improve: |U| != |V|");

    Adjacency adj;
    adj.offsets.assign(total + 1, 0);
    std::vector<std::vector<AgentId>> out(total);
    for (std::size_t t = 0; t < total; ++t) {
      if (in_r_[t]) continue;
      for (std::uint32_t e = in_off_[t]; e < in_off_[t + 1]; ++e) {
        std::uint32_t s = in_src_[e];
        if (!in_r_[s] && augmenting(s, in_loc_[e])) out[s].push_back(agent_id(t));
      }
    }
    for (std::size_t v = 0; v < total; ++v) {
      adj.targets.insert(adj.targets.end(), out[v].begin(), out[v].end());
      adj.offsets[v + 1] = static_cast<std::uint32_t>(adj.targets.size());
    }
    if (!find_cycle(adj, total).empty())
      throw std::logic_error("hm_improve: working sub-allocation is blocked");
  }

  void verify_no_envy_into_r() const {
    for (std::size_t t = 0; t < n_ + m_; ++t) {
      if (!in_r_[t]) continue;
      for (std::uint32_t e = in_off_[t]; e < in_off_[t + 1]; ++e) {
        std::uint32_t s = in_src_[e];
        if (!in_r_[s] && augmenting(s, in_loc_[e]))
          throw std::logic_error("hm_improve: an agent envies the removed set");
      }
    }
  }

  const HousingMarket& h2_;
  std::uint32_t p_;
  std::size_t n_, m_;
  bool check_;
  std::vector<std::uint32_t> shadow_of_, owner_;
  std::vector<std::uint32_t> in_off_, in_src_;
  std::vector<Local> in_loc_;
  std::vector<std::uint32_t> ptr_;
  std::vector<std::uint32_t> out_, in_;
  std::vector<Local> out_loc_;
  std::vector<char> in_v_, in_r_;
  // Sources split by whether an augmenting arc may still enter them.
  std::set<std::uint32_t> active_, dead_;
  std::size_t sources_outside_v_ = 0;
  std::size_t bound_ = 0;
  std::size_t iterations_ = 0;
};

}  // namespace detail

// Repairs a core allocation X of H after the p-improvement H2 so that the
// result is in the core of H2 and p ends up with X(p) or something she
// strictly prefers.
inline HmImproveResult hm_improve_traced(const HousingMarket& h, const HousingMarket& h2,
                                         AgentId p, const Allocation& x,
                                         HmImproveOptions options = {}) {
  require_same_agents(h, h2);
  if (index(p) >= h.agent_count()) throw Error(ErrorCode::UnknownAgent, "p is not an agent");
  if (auto why = p_improvement_violation(h, h2, p))
    throw Error(ErrorCode::NotAnImprovement, "second market is not a p-improvement (" + *why + ")");
  validate_allocation(h, x);
  if (auto v = check_core(h, x); !v.in_core())
    throw Error(ErrorCode::NotInCore, "allocation is blocked in the first market");

  HmImproveResult result;
  if (check_core(h2, x).in_core()) {
    result.allocation = x;
    result.unchanged = true;
    return result;
  }
  for (AgentId a : changed_agents(h, h2))
    if (h2.prefs(a).less(x[a], p)) result.shadowed.push_back(a);
  if (result.shadowed.empty())
    throw std::logic_error("hm_improve: blocked in H2 but no agent envies p");

  detail::HmImprove state(h2, p, x, result.shadowed, options.check_invariants);
  state.run();
  result.allocation = Allocation(state.assemble(result.irrelevant));
  result.iterations = state.iterations();
  result.iteration_bound = state.iteration_bound();

  try {
    validate_allocation(h2, result.allocation);
  } catch (const Error& e) {
    throw std::logic_error(std::string("hm_improve produced an invalid allocation: ") + e.what());
  }
  const PreferencePoset& pp = h2.prefs(p);
  AgentId before = x[p], after = result.allocation[p];
  if (before != after && !pp.less(before, after))
    throw std::logic_error("hm_improve: p did not improve");
  if (options.check_invariants && !check_core(h2, result.allocation).in_core())
    throw std::logic_error("hm_improve: output is not in the core");
  return result;
}

inline Allocation hm_improve(const HousingMarket& h, const HousingMarket& h2, AgentId p,
                             const Allocation& x, HmImproveOptions options = {}) {
  return hm_improve_traced(h, h2, p, x, options).allocation;
}

}  // namespace coremarket

#endif  // COREMARKET_HM_IMPROVE_HPP
