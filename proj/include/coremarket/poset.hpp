#ifndef COREMARKET_POSET_HPP
#define COREMARKET_POSET_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coremarket/error.hpp"

namespace coremarket {

// Agents are identified by their ordinal in the market. The ordinal order is
// the tie-breaking order used by every deterministic choice in the library.
enum class AgentId : std::uint32_t {};

inline constexpr AgentId kNoAgent{std::numeric_limits<std::uint32_t>::max()};

constexpr std::size_t index(AgentId a) { return static_cast<std::size_t>(a); }
constexpr AgentId agent_id(std::size_t i) {
  return static_cast<AgentId>(static_cast<std::uint32_t>(i));
}

// One agent's preferences: a strict partial order over the houses she finds
// acceptable, stored as its Hasse diagram plus a reachability bitset per
// house. An acceptable house is one that is not strictly worse than the
// owner's own house; houses below the owner are simply left out.
//
// Houses are addressed either by AgentId or by their local index, which is
// the position in acceptable() (sorted by ordinal).
class PreferencePoset {
 public:
  using Local = std::uint32_t;
  static constexpr Local npos = std::numeric_limits<Local>::max();

  // `relations` holds pairs (worse, better). They need not be covers; the
  // Hasse diagram is recovered by transitive reduction. The owner is added to
  // `acceptable` if missing. `names`, when given, is used in error messages.
  static PreferencePoset build(AgentId owner, std::vector<AgentId> acceptable,
                               const std::vector<std::pair<AgentId, AgentId>>& relations,
                               const std::vector<std::string>* names = nullptr);

  // Weak order given as tie classes, most preferred first. If the owner is not
  // mentioned she forms a last class of her own.
  static PreferencePoset from_classes(AgentId owner,
                                      const std::vector<std::vector<AgentId>>& classes,
                                      const std::vector<std::string>* names = nullptr);

  // Strict order, most preferred first; the owner goes last unless listed.
  static PreferencePoset from_list(AgentId owner, const std::vector<AgentId>& best_first) {
    std::vector<std::vector<AgentId>> classes;
    classes.reserve(best_first.size());
    for (AgentId a : best_first) classes.push_back({a});
    return from_classes(owner, classes);
  }

  AgentId owner() const { return owner_; }
  std::span<const AgentId> acceptable() const { return acceptable_; }
  std::size_t acceptable_count() const { return acceptable_.size(); }
  AgentId house(Local i) const { return acceptable_[i]; }

  Local local_index(AgentId h) const {
    auto it = std::lower_bound(acceptable_.begin(), acceptable_.end(), h);
    if (it == acceptable_.end() || *it != h) return npos;
    return static_cast<Local>(it - acceptable_.begin());
  }
  bool accepts(AgentId h) const { return local_index(h) != npos; }

  // x ≺ y: the owner strictly prefers y to x. False unless both acceptable.
  bool less(AgentId x, AgentId y) const {
    Local i = local_index(x), j = local_index(y);
    return i != npos && j != npos && less_local(i, j);
  }
  // x ⪯ y, i.e. not y ≺ x (so incomparable houses satisfy both directions).
  bool less_equal(AgentId x, AgentId y) const { return !less(y, x); }
  bool incomparable(AgentId x, AgentId y) const { return !less(x, y) && !less(y, x); }

  bool less_local(Local i, Local j) const {
    return (above_[i * words_ + (j >> 6)] >> (j & 63)) & 1u;
  }

  // Calls f(j) for each local j with i ≺ j, in increasing order.
  template <class F>
  void for_each_above(Local i, F&& f) const {
    const std::uint64_t* row = above_.data() + static_cast<std::size_t>(i) * words_;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = row[w];
      while (bits) {
        f(static_cast<Local>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
        bits &= bits - 1;
      }
    }
  }

  // Hasse out-neighbours (immediately better houses) and in-neighbours.
  std::span<const Local> better_covers(Local i) const {
    return {up_.data() + up_offsets_[i], up_.data() + up_offsets_[i + 1]};
  }
  std::span<const Local> worse_covers(Local i) const {
    return {down_.data() + down_offsets_[i], down_.data() + down_offsets_[i + 1]};
  }

  std::size_t cover_count() const { return up_.size(); }
  // Covers as (worse, better) pairs, sorted by ordinals.
  std::vector<std::pair<AgentId, AgentId>> covers() const;

  // |H_a|: vertices plus arcs of the Hasse diagram.
  std::size_t size() const { return acceptable_.size() + up_.size(); }

  // Tie classes, most preferred first, if the order is a weak order.
  std::optional<std::vector<std::vector<AgentId>>> tie_classes() const;
  bool is_weak_order() const { return tie_classes().has_value(); }
  bool is_strict_order() const;

  friend bool operator==(const PreferencePoset& a, const PreferencePoset& b) {
    return a.owner_ == b.owner_ && a.acceptable_ == b.acceptable_ &&
           a.up_offsets_ == b.up_offsets_ && a.up_ == b.up_;
  }

 private:
  PreferencePoset() = default;

  AgentId owner_{};
  std::vector<AgentId> acceptable_;
  std::vector<std::uint32_t> up_offsets_, up_;
  std::vector<std::uint32_t> down_offsets_, down_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> above_;
};

namespace detail {

inline std::string house_label(AgentId a, const std::vector<std::string>* names) {
  if (names != nullptr && index(a) < names->size()) return (*names)[index(a)];
  return "#" + std::to_string(index(a));
}

}  // namespace detail

inline PreferencePoset PreferencePoset::build(
    AgentId owner, std::vector<AgentId> acceptable,
    const std::vector<std::pair<AgentId, AgentId>>& relations,
    const std::vector<std::string>* names) {
  using detail::house_label;
  PreferencePoset p;
  p.owner_ = owner;
  acceptable.push_back(owner);
  std::sort(acceptable.begin(), acceptable.end());
  acceptable.erase(std::unique(acceptable.begin(), acceptable.end()), acceptable.end());
  p.acceptable_ = std::move(acceptable);

  const std::size_t k = p.acceptable_.size();
  std::vector<std::pair<Local, Local>> edges;
  edges.reserve(relations.size());
  for (auto [x, y] : relations) {
    Local i = p.local_index(x), j = p.local_index(y);
    if (i == npos || j == npos) {
      throw Error(ErrorCode::SelfDispreferred,
                  "preference of " + house_label(owner, names) + " relates " +
                      house_label(i == npos ? x : y, names) + ", which is not acceptable");
    }
    if (i == j) {
      throw Error(ErrorCode::CyclicPreference, house_label(owner, names) + " ranks " +
                                                   house_label(x, names) + " below itself");
    }
    edges.emplace_back(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<std::uint32_t> offsets(k + 1, 0);
  for (auto [i, j] : edges) ++offsets[i + 1];
  for (std::size_t i = 0; i < k; ++i) offsets[i + 1] += offsets[i];
  std::vector<Local> succ(edges.size());
  {
    std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
    for (auto [i, j] : edges) succ[fill[i]++] = j;
  }

  // Kahn's algorithm on reversed edges: process the best houses first, so
  // every successor's closure row is final before it is merged.
  std::vector<std::uint32_t> pending(k);
  for (std::size_t i = 0; i < k; ++i) pending[i] = offsets[i + 1] - offsets[i];
  std::vector<std::vector<Local>> pred(k);
  for (auto [i, j] : edges) pred[j].push_back(i);
  std::vector<Local> order;
  order.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    if (pending[i] == 0) order.push_back(static_cast<Local>(i));
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (Local i : pred[order[head]])
      if (--pending[i] == 0) order.push_back(i);
  }
  if (order.size() != k) {
    throw Error(ErrorCode::CyclicPreference,
                "preference of " + house_label(owner, names) + " contains a cycle");
  }

  p.words_ = (k + 63) / 64;
  const std::size_t words = p.words_;
  p.above_.assign(k * words, 0);
  for (Local i : order) {
    std::uint64_t* row = p.above_.data() + static_cast<std::size_t>(i) * words;
    for (std::uint32_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      Local j = succ[e];
      const std::uint64_t* other = p.above_.data() + static_cast<std::size_t>(j) * words;
      for (std::size_t w = 0; w < words; ++w) row[w] |= other[w];
      row[j >> 6] |= std::uint64_t{1} << (j & 63);
    }
  }

  const Local own = p.local_index(owner);
  for (std::size_t i = 0; i < k; ++i) {
    if (p.less_local(static_cast<Local>(i), own)) {
      throw Error(ErrorCode::SelfDispreferred,
                  house_label(owner, names) + " ranks " + house_label(p.acceptable_[i], names) +
                      " below her own house; leave unacceptable houses out instead");
    }
  }

  // A direct successor j of i is a cover unless it is above another direct
  // successor of i.
  std::vector<std::uint64_t> redundant(words);
  p.up_offsets_.assign(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::fill(redundant.begin(), redundant.end(), 0);
    for (std::uint32_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const std::uint64_t* other = p.above_.data() + static_cast<std::size_t>(succ[e]) * words;
      for (std::size_t w = 0; w < words; ++w) redundant[w] |= other[w];
    }
    for (std::uint32_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      Local j = succ[e];
      if (!((redundant[j >> 6] >> (j & 63)) & 1u)) p.up_.push_back(j);
    }
    p.up_offsets_[i + 1] = static_cast<std::uint32_t>(p.up_.size());
  }

  p.down_offsets_.assign(k + 1, 0);
  for (Local j : p.up_) ++p.down_offsets_[j + 1];
  for (std::size_t i = 0; i < k; ++i) p.down_offsets_[i + 1] += p.down_offsets_[i];
  p.down_.resize(p.up_.size());
  {
    std::vector<std::uint32_t> fill(p.down_offsets_.begin(), p.down_offsets_.end() - 1);
    for (std::size_t i = 0; i < k; ++i)
      for (std::uint32_t e = p.up_offsets_[i]; e < p.up_offsets_[i + 1]; ++e)
        p.down_[fill[p.up_[e]]++] = static_cast<Local>(i);
  }
  return p;
}

inline PreferencePoset PreferencePoset::from_classes(
    AgentId owner, const std::vector<std::vector<AgentId>>& classes,
    const std::vector<std::string>* names) {
  std::vector<std::vector<AgentId>> cls;
  bool owner_listed = false;
  std::vector<AgentId> acceptable;
  for (const auto& c : classes) {
    if (c.empty()) continue;
    cls.push_back(c);
    for (AgentId a : c) {
      acceptable.push_back(a);
      if (a == owner) owner_listed = true;
    }
  }
  if (!owner_listed) cls.push_back({owner});
  {
    std::vector<AgentId> sorted = acceptable;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::CyclicPreference,
                  "preference list of " + detail::house_label(owner, names) +
                      " mentions a house twice");
    }
  }
  std::vector<std::pair<AgentId, AgentId>> relations;
  for (std::size_t t = 0; t + 1 < cls.size(); ++t)
    for (AgentId better : cls[t])
      for (AgentId worse : cls[t + 1]) relations.emplace_back(worse, better);
  return build(owner, std::move(acceptable), relations, names);
}

inline std::vector<std::pair<AgentId, AgentId>> PreferencePoset::covers() const {
  std::vector<std::pair<AgentId, AgentId>> out;
  out.reserve(up_.size());
  for (std::size_t i = 0; i + 1 < up_offsets_.size(); ++i)
    for (std::uint32_t e = up_offsets_[i]; e < up_offsets_[i + 1]; ++e)
      out.emplace_back(acceptable_[i], acceptable_[up_[e]]);
  return out;
}

inline std::optional<std::vector<std::vector<AgentId>>> PreferencePoset::tie_classes() const {
  const std::size_t k = acceptable_.size();
  auto row = [&](std::size_t i) { return above_.data() + i * words_; };
  auto count = [&](std::size_t i) {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_; ++w) c += static_cast<std::size_t>(std::popcount(row(i)[w]));
    return c;
  };
  std::vector<std::pair<std::size_t, std::size_t>> by_height;
  for (std::size_t i = 0; i < k; ++i) by_height.emplace_back(count(i), i);
  std::sort(by_height.begin(), by_height.end());

  // In a weak order the set above a house is exactly the union of all
  // classes before its own.
  std::vector<std::vector<AgentId>> classes;
  std::vector<std::uint64_t> seen(words_, 0);
  std::size_t pos = 0;
  while (pos < k) {
    std::size_t end = pos;
    while (end < k && by_height[end].first == by_height[pos].first) ++end;
    std::vector<AgentId> cls;
    for (std::size_t t = pos; t < end; ++t) {
      std::size_t i = by_height[t].second;
      if (!std::equal(seen.begin(), seen.end(), row(i))) return std::nullopt;
      cls.push_back(acceptable_[i]);
    }
    for (std::size_t t = pos; t < end; ++t) {
      std::size_t i = by_height[t].second;
      seen[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    classes.push_back(std::move(cls));
    pos = end;
  }
  return classes;
}

inline bool PreferencePoset::is_strict_order() const {
  auto classes = tie_classes();
  if (!classes) return false;
  return std::all_of(classes->begin(), classes->end(),
                     [](const auto& c) { return c.size() == 1; });
}

}  // namespace coremarket

#endif  // COREMARKET_POSET_HPP
