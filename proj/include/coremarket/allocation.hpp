#ifndef COREMARKET_ALLOCATION_HPP
#define COREMARKET_ALLOCATION_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coremarket/error.hpp"
#include "coremarket/market.hpp"
#include "coremarket/poset.hpp"

namespace coremarket {

struct Arc {
  AgentId from;
  AgentId to;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

// X(a) for every agent a. Validity against a market is checked separately by
// validate_allocation.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(std::vector<AgentId> target) : target_(std::move(target)) {}

  static Allocation identity(std::size_t n) {
    std::vector<AgentId> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = agent_id(i);
    return Allocation(std::move(t));
  }

  AgentId operator[](AgentId a) const { return target_[index(a)]; }
  std::size_t agent_count() const { return target_.size(); }
  std::span<const AgentId> targets() const { return target_; }
  bool contains(AgentId a, AgentId b) const { return target_[index(a)] == b; }

  // Number of agents not keeping their own house.
  std::size_t trading_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < target_.size(); ++i) c += target_[i] != agent_id(i);
    return c;
  }

  // Cycles, each starting at its lowest ordinal, listed by that ordinal.
  // Assumes a bijection.
  std::vector<std::vector<AgentId>> cycles() const {
    std::vector<std::vector<AgentId>> out;
    std::vector<char> seen(target_.size(), 0);
    for (std::size_t i = 0; i < target_.size(); ++i) {
      if (seen[i]) continue;
      std::vector<AgentId> cyc;
      for (AgentId a = agent_id(i); !seen[index(a)]; a = target_[index(a)]) {
        seen[index(a)] = 1;
        cyc.push_back(a);
      }
      out.push_back(std::move(cyc));
    }
    return out;
  }

  friend auto operator<=>(const Allocation&, const Allocation&) = default;

 private:
  std::vector<AgentId> target_;
};

// Throws InvalidAllocation unless X is a bijection on the agents using only
// acceptable arcs.
inline void validate_allocation(const HousingMarket& h, const Allocation& x) {
  const std::size_t n = h.agent_count();
  if (x.agent_count() != n)
    throw Error(ErrorCode::InvalidAllocation, "allocation covers " + std::to_string(x.agent_count()) +
                                                  " agents, market has " + std::to_string(n));
  std::vector<char> taken(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    AgentId a = agent_id(i), b = x[a];
    if (index(b) >= n) throw Error(ErrorCode::InvalidAllocation, "house out of range");
    if (taken[index(b)])
      throw Error(ErrorCode::InvalidAllocation, "house of '" + h.name(b) + "' assigned twice");
    taken[index(b)] = 1;
    if (!h.prefs(a).accepts(b))
      throw Error(ErrorCode::InvalidAllocation,
                  "'" + h.name(a) + "' does not accept the house of '" + h.name(b) + "'");
  }
}

struct AcceptabilityGraph {
  std::size_t vertex_count = 0;
  std::vector<Arc> arcs;  // sorted, loops included
  // |G^H| = |N| + |E|
  std::size_t size() const { return vertex_count + arcs.size(); }
};

inline AcceptabilityGraph acceptability_graph(const HousingMarket& h) {
  AcceptabilityGraph g;
  g.vertex_count = h.agent_count();
  for (std::size_t i = 0; i < h.agent_count(); ++i)
    for (AgentId b : h.prefs(agent_id(i)).acceptable()) g.arcs.push_back({agent_id(i), b});
  return g;
}

struct EnvyGraph {
  std::size_t vertex_count = 0;
  std::vector<Arc> arcs;  // sorted
};

namespace detail {

// Local index of X(a) in each agent's acceptable list.
inline std::vector<PreferencePoset::Local> assigned_locals(const HousingMarket& h,
                                                           const Allocation& x) {
  std::vector<PreferencePoset::Local> loc(h.agent_count());
  for (std::size_t i = 0; i < h.agent_count(); ++i)
    loc[i] = h.prefs(agent_id(i)).local_index(x[agent_id(i)]);
  return loc;
}

// Out-adjacency in CSR form.
struct Adjacency {
  std::vector<std::uint32_t> offsets;
  std::vector<AgentId> targets;
  std::span<const AgentId> out(std::size_t v) const {
    return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
  }
};

inline Adjacency envy_adjacency(const HousingMarket& h, const Allocation& x) {
  Adjacency adj;
  const std::size_t n = h.agent_count();
  adj.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const PreferencePoset& p = h.prefs(agent_id(i));
    p.for_each_above(p.local_index(x[agent_id(i)]),
                     [&](PreferencePoset::Local j) { adj.targets.push_back(p.house(j)); });
    adj.offsets[i + 1] = static_cast<std::uint32_t>(adj.targets.size());
  }
  return adj;
}

// First cycle closed by an iterative DFS that starts from vertices in
// increasing order and scans out-neighbours in the stored order. Empty if the
// graph is acyclic. The cycle is returned in arc order.
inline std::vector<AgentId> find_cycle(const Adjacency& adj, std::size_t n) {
  std::vector<std::uint8_t> color(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<std::uint32_t> pos(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (color[s] != 0) continue;
    stack.push_back(s);
    color[s] = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      auto out = adj.out(v);
      if (pos[v] < out.size()) {
        std::size_t w = index(out[pos[v]++]);
        if (color[w] == 0) {
          color[w] = 1;
          stack.push_back(w);
        } else if (color[w] == 1) {
          auto it = std::find(stack.begin(), stack.end(), w);
          std::vector<AgentId> cyc;
          for (; it != stack.end(); ++it) cyc.push_back(agent_id(*it));
          return cyc;
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

}  // namespace detail

inline EnvyGraph envy_graph(const HousingMarket& h, const Allocation& x) {
  EnvyGraph g;
  g.vertex_count = h.agent_count();
  auto adj = detail::envy_adjacency(h, x);
  for (std::size_t i = 0; i < g.vertex_count; ++i)
    for (AgentId b : adj.out(i)) g.arcs.push_back({agent_id(i), b});
  return g;
}

// Verdict of a (strict) core check. A blocking cycle c_0, c_1, ..., c_{k-1}
// means every c_i would rather have the house of c_{i+1} (indices mod k).
struct CoreVerdict {
  std::vector<AgentId> blocking_cycle;
  bool in_core() const { return blocking_cycle.empty(); }
  explicit operator bool() const { return in_core(); }
};

// X is in the core iff its envy graph is acyclic. O(|G^H|) plus the bitset
// scans of the closure rows.
inline CoreVerdict check_core(const HousingMarket& h, const Allocation& x) {
  validate_allocation(h, x);
  return {detail::find_cycle(detail::envy_adjacency(h, x), h.agent_count())};
}

// X is in the strict core iff no cycle consists of weakly augmenting arcs
// (X(a) ⪯_a b) with at least one strictly augmenting arc. Such a cycle exists
// iff some strict arc joins two vertices of the same strongly connected
// component of the weak-arc graph.
inline CoreVerdict check_strict_core(const HousingMarket& h, const Allocation& x) {
  validate_allocation(h, x);
  const std::size_t n = h.agent_count();
  auto loc = detail::assigned_locals(h, x);

  // Weakly augmenting arcs, loops excluded (a loop is never strict).
  detail::Adjacency weak;
  weak.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const PreferencePoset& p = h.prefs(agent_id(i));
    for (std::size_t j = 0; j < p.acceptable_count(); ++j) {
      auto jl = static_cast<PreferencePoset::Local>(j);
      if (p.house(jl) != agent_id(i) && !p.less_local(jl, loc[i])) weak.targets.push_back(p.house(jl));
    }
    weak.offsets[i + 1] = static_cast<std::uint32_t>(weak.targets.size());
  }

  // Tarjan's SCC, iterative.
  constexpr std::uint32_t kUnset = UINT32_MAX;
  std::vector<std::uint32_t> idx(n, kUnset), low(n, 0), comp(n, kUnset), pos(n, 0);
  std::vector<std::size_t> call, scc_stack;
  std::vector<char> on_stack(n, 0);
  std::uint32_t counter = 0, comps = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (idx[s] != kUnset) continue;
    call.push_back(s);
    idx[s] = low[s] = counter++;
    scc_stack.push_back(s);
    on_stack[s] = 1;
    while (!call.empty()) {
      std::size_t v = call.back();
      auto out = weak.out(v);
      if (pos[v] < out.size()) {
        std::size_t w = index(out[pos[v]++]);
        if (idx[w] == kUnset) {
          idx[w] = low[w] = counter++;
          scc_stack.push_back(w);
          on_stack[w] = 1;
          call.push_back(w);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
      } else {
        call.pop_back();
        if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[v]);
        if (low[v] == idx[v]) {
          std::size_t w;
          do {
            w = scc_stack.back();
            scc_stack.pop_back();
            on_stack[w] = 0;
            comp[w] = comps;
          } while (w != v);
          ++comps;
        }
      }
    }
  }

  for (std::size_t a = 0; a < n; ++a) {
    const PreferencePoset& p = h.prefs(agent_id(a));
    AgentId found = kNoAgent;
    p.for_each_above(loc[a], [&](PreferencePoset::Local j) {
      if (found == kNoAgent && comp[index(p.house(j))] == comp[a]) found = p.house(j);
    });
    if (found == kNoAgent) continue;
    // Shortest weak path from `found` back to a, inside the component.
    std::vector<std::uint32_t> parent(n, kUnset);
    std::vector<std::size_t> queue{index(found)};
    parent[index(found)] = static_cast<std::uint32_t>(index(found));
    for (std::size_t head = 0; head < queue.size() && parent[a] == kUnset; ++head) {
      std::size_t v = queue[head];
      for (AgentId w : weak.out(v)) {
        if (comp[index(w)] != comp[a] || parent[index(w)] != kUnset) continue;
        parent[index(w)] = static_cast<std::uint32_t>(v);
        queue.push_back(index(w));
      }
    }
    std::vector<AgentId> back;
    for (std::size_t v = a; v != index(found); v = parent[v]) back.push_back(agent_id(v));
    back.push_back(found);
    std::reverse(back.begin(), back.end());  // found, ..., a
    std::vector<AgentId> cyc{agent_id(a)};
    cyc.insert(cyc.end(), back.begin(), back.end() - 1);
    return {cyc};
  }
  return {};
}

}  // namespace coremarket

#endif  // COREMARKET_ALLOCATION_HPP
