#ifndef COREMARKET_TTC_HPP
#define COREMARKET_TTC_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "coremarket/allocation.hpp"
#include "coremarket/market.hpp"
#include "coremarket/poset.hpp"

namespace coremarket {

namespace detail {

// Top trading cycles over partial orders in O(|H| log) time.
//
// Every remaining agent b points at an undominated remaining house in her
// Hasse diagram H_b. A node of H_b is "popped" once its house has left the
// market and every node above it has been popped; a node whose better covers
// are all popped is maximal, and it is undominated exactly when its house is
// still present. Each Hasse arc is therefore touched once.
//
// Agents outside `active` (when given) count as already gone and keep their
// own house in the result.
class TopTradingCycles {
 public:
  TopTradingCycles(const HousingMarket& h, const std::vector<char>* active) : h_(h) {
    const std::size_t n = h.agent_count();
    removed_.assign(n, 0);
    if (active != nullptr)
      for (std::size_t a = 0; a < n; ++a) removed_[a] = !(*active)[a];
    base_.assign(n + 1, 0);
    for (std::size_t b = 0; b < n; ++b)
      base_[b + 1] = base_[b] + static_cast<std::uint32_t>(h.prefs(agent_id(b)).acceptable_count());
    pending_.assign(base_[n], 0);
    in_u_.assign(base_[n], 0);
    heap_.resize(base_[n]);
    heap_size_.assign(n, 0);
    // occ_ is bucketed by house: one slot per list that mentions it.
    occ_base_.assign(n + 1, 0);
    for (std::size_t b = 0; b < n; ++b) {
      const PreferencePoset& p = h.prefs(agent_id(b));
      for (std::size_t i = 0; i < p.acceptable_count(); ++i)
        ++occ_base_[index(p.house(static_cast<PreferencePoset::Local>(i))) + 1];
    }
    for (std::size_t a = 0; a < n; ++a) occ_base_[a + 1] += occ_base_[a];
    occ_.resize(occ_base_[n]);
    occ_size_.assign(n, 0);
    target_.resize(n);
    for (std::size_t a = 0; a < n; ++a) target_[a] = agent_id(a);

    for (std::size_t b = 0; b < n; ++b) {
      if (removed_[b]) continue;
      const PreferencePoset& p = h.prefs(agent_id(b));
      for (std::size_t i = 0; i < p.acceptable_count(); ++i)
        pending_[base_[b] + i] =
            static_cast<std::uint32_t>(p.better_covers(static_cast<PreferencePoset::Local>(i)).size());
      // Collect the roots before settling any: popping an absent house can
      // bring a later node to zero, and drain() settles that one itself.
      roots_.clear();
      for (std::size_t i = 0; i < p.acceptable_count(); ++i)
        if (pending_[base_[b] + i] == 0) roots_.push_back(static_cast<PreferencePoset::Local>(i));
      for (PreferencePoset::Local i : roots_) settle(b, i);
    }
  }

  std::vector<AgentId> run() {
    const std::size_t n = h_.agent_count();
    std::vector<std::uint32_t> path;
    std::vector<std::uint32_t> on_path(n, UINT32_MAX);
    std::vector<std::uint32_t> cycle;
    for (std::size_t start = 0; start < n; ++start) {
      if (removed_[start]) continue;
      path.push_back(static_cast<std::uint32_t>(start));
      on_path[start] = 0;
      while (!path.empty()) {
        const std::size_t a = path.back();
        const std::size_t b = index(choice(a));
        if (on_path[b] == UINT32_MAX) {
          on_path[b] = static_cast<std::uint32_t>(path.size());
          path.push_back(static_cast<std::uint32_t>(b));
          continue;
        }
        cycle.assign(path.begin() + on_path[b], path.end());
        path.resize(on_path[b]);
        for (std::size_t t = 0; t < cycle.size(); ++t) {
          target_[cycle[t]] = agent_id(cycle[(t + 1) % cycle.size()]);
          removed_[cycle[t]] = 1;
          on_path[cycle[t]] = UINT32_MAX;
        }
        for (std::uint32_t c : cycle) leave(c);
      }
    }
    return std::move(target_);
  }

 private:
  // The lowest-ordinal undominated house of a. Local indices follow ordinal
  // order, so this is the heap minimum.
  AgentId choice(std::size_t a) {
    PreferencePoset::Local* heap = heap_.data() + base_[a];
    while (!in_u_[base_[a] + heap[0]]) {
      std::pop_heap(heap, heap + heap_size_[a], std::greater<>{});
      --heap_size_[a];
    }
    return h_.prefs(agent_id(a)).house(heap[0]);
  }

  // Node i of H_b has no unpopped node above it.
  void settle(std::size_t b, PreferencePoset::Local i) {
    work_.push_back(i);
    drain(b);
  }

  void drain(std::size_t b) {
    const PreferencePoset& p = h_.prefs(agent_id(b));
    while (!work_.empty()) {
      PreferencePoset::Local v = work_.back();
      work_.pop_back();
      AgentId house = p.house(v);
      if (removed_[index(house)]) {
        pop(b, v);
      } else {
        in_u_[base_[b] + v] = 1;
        PreferencePoset::Local* heap = heap_.data() + base_[b];
        heap[heap_size_[b]++] = v;
        std::push_heap(heap, heap + heap_size_[b], std::greater<>{});
        const std::size_t a = index(house);
        occ_[occ_base_[a] + occ_size_[a]++] = {static_cast<std::uint32_t>(b), v};
      }
    }
  }

  void pop(std::size_t b, PreferencePoset::Local v) {
    for (PreferencePoset::Local w : h_.prefs(agent_id(b)).worse_covers(v))
      if (--pending_[base_[b] + w] == 0) work_.push_back(w);
  }

  // House a has left; update every U(b) that contains it.
  void leave(std::size_t a) {
    // a is gone, so drain() never appends to this bucket while we walk it.
    for (std::uint32_t k = occ_base_[a]; k < occ_base_[a] + occ_size_[a]; ++k) {
      auto [b, v] = occ_[k];
      if (removed_[b] || !in_u_[base_[b] + v]) continue;
      in_u_[base_[b] + v] = 0;
      pop(b, v);
      drain(b);
    }
  }

  const HousingMarket& h_;
  std::vector<char> removed_;
  std::vector<std::uint32_t> base_;
  std::vector<std::uint32_t> pending_;
  std::vector<char> in_u_;
  std::vector<PreferencePoset::Local> heap_;  // per-agent slices at base_
  std::vector<std::uint32_t> heap_size_;
  std::vector<std::pair<std::uint32_t, PreferencePoset::Local>> occ_;
  std::vector<std::uint32_t> occ_base_;
  std::vector<std::uint32_t> occ_size_;
  std::vector<PreferencePoset::Local> work_;
  std::vector<PreferencePoset::Local> roots_;
  std::vector<AgentId> target_;
};

}  // namespace detail

// A core allocation of H. Paths start at the lowest-ordinal remaining agent
// and follow the lowest-ordinal undominated house; each cycle found is
// removed at once and the walk resumes from the agent before it.
inline Allocation ttc(const HousingMarket& h) {
  return Allocation(detail::TopTradingCycles(h, nullptr).run());
}

// TTC on the submarket induced by `agents`, returned as an allocation of the
// whole market in which everyone else keeps her own house.
inline Allocation ttc_restricted(const HousingMarket& h, std::span<const AgentId> agents) {
  std::vector<char> active(h.agent_count(), 0);
  for (AgentId a : agents) active[index(a)] = 1;
  return Allocation(detail::TopTradingCycles(h, &active).run());
}

// Any core allocation trades at least OPT/|N| agents; TTC supplies one.
inline Allocation maxcore_trivial_approx(const HousingMarket& h) { return ttc(h); }

}  // namespace coremarket

#endif  // COREMARKET_TTC_HPP
