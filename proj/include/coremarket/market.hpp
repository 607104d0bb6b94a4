#ifndef COREMARKET_MARKET_HPP
#define COREMARKET_MARKET_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coremarket/error.hpp"
#include "coremarket/poset.hpp"

namespace coremarket {

inline bool is_valid_agent_name(std::string_view name) {
  if (name.empty() || name.front() == '@' || name == "->" || name == "--") return false;
  for (char c : name) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7f) return false;
    if (c == '#' || c == ':' || c == '<' || c == '>' || c == '[' || c == ']' || c == ',')
      return false;
  }
  return true;
}

// An arc (a, b) of the acceptability graph, seen from b: `source` accepts b,
// and b sits at `local` in the source's acceptable list.
struct InArc {
  AgentId source;
  PreferencePoset::Local local;
};

// A housing market: agents in ordinal order, each owning one house, each with
// a partial order over acceptable houses. Immutable after construction.
class HousingMarket {
 public:
  HousingMarket(std::vector<std::string> names, std::vector<PreferencePoset> prefs);

  std::size_t agent_count() const { return names_.size(); }
  const std::string& name(AgentId a) const { return names_[index(a)]; }
  const std::vector<std::string>& names() const { return names_; }
  const PreferencePoset& prefs(AgentId a) const { return prefs_[index(a)]; }

  std::optional<AgentId> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }
  AgentId agent(std::string_view name) const {
    auto a = find(name);
    if (!a) throw Error(ErrorCode::UnknownAgent, "no agent named '" + std::string(name) + "'");
    return *a;
  }

  // Arcs entering a, ordered by source ordinal; includes the loop (a, a).
  std::span<const InArc> in_arcs(AgentId a) const {
    return {in_.data() + in_offsets_[index(a)], in_.data() + in_offsets_[index(a) + 1]};
  }

  // |E| of the acceptability graph, loops included.
  std::size_t arc_count() const { return in_.size(); }
  // |H| = sum of Hasse diagram sizes.
  std::size_t description_size() const { return description_size_; }

  // Copy of this market with one agent's preferences replaced.
  HousingMarket with_preferences(AgentId a, PreferencePoset poset) const;

  // Market induced by `agents` (kept in the given order, renumbered from 0);
  // each preference is restricted and its Hasse diagram recomputed.
  HousingMarket submarket(std::span<const AgentId> agents) const;

  friend bool operator==(const HousingMarket& a, const HousingMarket& b) {
    return a.names_ == b.names_ && a.prefs_ == b.prefs_;
  }

 private:
  void index_arcs();

  std::vector<std::string> names_;
  std::vector<PreferencePoset> prefs_;
  std::unordered_map<std::string, AgentId> by_name_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<InArc> in_;
  std::size_t description_size_ = 0;
};

inline HousingMarket::HousingMarket(std::vector<std::string> names,
                                    std::vector<PreferencePoset> prefs)
    : names_(std::move(names)), prefs_(std::move(prefs)) {
  if (names_.size() != prefs_.size())
    throw Error(ErrorCode::BadParams, "one preference order per agent is required");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!is_valid_agent_name(names_[i]))
      throw Error(ErrorCode::BadParams, "invalid agent name '" + names_[i] + "'");
    if (!by_name_.emplace(names_[i], agent_id(i)).second)
      throw Error(ErrorCode::DuplicateAgent, "agent '" + names_[i] + "' declared twice");
    if (prefs_[i].owner() != agent_id(i))
      throw Error(ErrorCode::BadParams, "preference order of '" + names_[i] + "' has the wrong owner");
    for (AgentId h : prefs_[i].acceptable())
      if (index(h) >= names_.size())
        throw Error(ErrorCode::UnknownAgent, "house ordinal out of range in preferences of '" +
                                                 names_[i] + "'");
  }
  index_arcs();
}

inline void HousingMarket::index_arcs() {
  const std::size_t n = names_.size();
  in_offsets_.assign(n + 1, 0);
  description_size_ = 0;
  for (const auto& p : prefs_) {
    description_size_ += p.size();
    for (AgentId h : p.acceptable()) ++in_offsets_[index(h) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) in_offsets_[i + 1] += in_offsets_[i];
  in_.resize(in_offsets_[n]);
  std::vector<std::uint32_t> fill(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t a = 0; a < n; ++a) {
    auto acc = prefs_[a].acceptable();
    for (std::size_t j = 0; j < acc.size(); ++j)
      in_[fill[index(acc[j])]++] = InArc{agent_id(a), static_cast<PreferencePoset::Local>(j)};
  }
}

inline HousingMarket HousingMarket::with_preferences(AgentId a, PreferencePoset poset) const {
  std::vector<PreferencePoset> prefs = prefs_;
  prefs[index(a)] = std::move(poset);
  return HousingMarket(names_, std::move(prefs));
}

inline HousingMarket HousingMarket::submarket(std::span<const AgentId> agents) const {
  std::vector<std::uint32_t> renumber(names_.size(), UINT32_MAX);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (renumber[index(agents[i])] != UINT32_MAX)
      throw Error(ErrorCode::DuplicateAgent, "agent '" + name(agents[i]) + "' listed twice");
    renumber[index(agents[i])] = static_cast<std::uint32_t>(i);
    names.push_back(names_[index(agents[i])]);
  }
  std::vector<PreferencePoset> prefs;
  prefs.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const PreferencePoset& p = prefs_[index(agents[i])];
    std::vector<AgentId> acceptable;
    std::vector<PreferencePoset::Local> kept;
    for (std::size_t j = 0; j < p.acceptable_count(); ++j) {
      std::uint32_t r = renumber[index(p.house(static_cast<PreferencePoset::Local>(j)))];
      if (r != UINT32_MAX) {
        acceptable.push_back(agent_id(r));
        kept.push_back(static_cast<PreferencePoset::Local>(j));
      }
    }
    std::vector<std::pair<AgentId, AgentId>> relations;
    for (auto x : kept)
      for (auto y : kept)
        if (p.less_local(x, y))
          relations.emplace_back(agent_id(renumber[index(p.house(x))]),
                                 agent_id(renumber[index(p.house(y))]));
    prefs.push_back(PreferencePoset::build(agent_id(i), std::move(acceptable), relations, &names));
  }
  return HousingMarket(std::move(names), std::move(prefs));
}

// Accumulates a market description by agent name, then validates it.
// Agents may be referenced before they are declared; resolution happens in
// build(). Each agent uses either list form or accept/cover form.
class MarketBuilder {
 public:
  // Marker for the owner's own house inside a list.
  static constexpr std::string_view kSelf = "@self";

  void add_agent(std::string name, std::size_t line = 0) {
    if (!is_valid_agent_name(name))
      throw Error(ErrorCode::SyntaxError, line, "invalid agent name '" + name + "'");
    if (declared_.count(name))
      throw Error(ErrorCode::DuplicateAgent, line, "agent '" + name + "' declared twice");
    declared_.emplace(name, names_.size());
    names_.push_back(std::move(name));
  }

  void accept(std::string_view owner, std::string_view house, std::size_t line = 0) {
    Entry& e = entry(owner, line, false);
    e.accept.push_back({std::string(house), line});
  }

  // `worse` ≺_owner `better`.
  void prefer(std::string_view owner, std::string_view worse, std::string_view better,
              std::size_t line = 0) {
    Entry& e = entry(owner, line, false);
    e.relations.push_back({std::string(worse), std::string(better), line});
  }

  // Tie classes, most preferred first; kSelf marks the owner's house.
  void set_list(std::string_view owner, std::vector<std::vector<std::string>> classes,
                std::size_t line = 0) {
    Entry& e = entry(owner, line, true);
    if (e.has_list)
      throw Error(ErrorCode::SyntaxError, line, "second list for '" + std::string(owner) + "'");
    e.has_list = true;
    e.list = std::move(classes);
    e.list_line = line;
  }

  std::size_t agent_count() const { return names_.size(); }

  HousingMarket build() const;

 private:
  struct NamedHouse {
    std::string name;
    std::size_t line;
  };
  struct NamedRelation {
    std::string worse, better;
    std::size_t line;
  };
  struct Entry {
    std::string owner;
    std::size_t first_line = 0;
    bool has_list = false;
    bool has_poset = false;
    std::vector<std::vector<std::string>> list;
    std::size_t list_line = 0;
    std::vector<NamedHouse> accept;
    std::vector<NamedRelation> relations;
  };

  Entry& entry(std::string_view owner, std::size_t line, bool list_form) {
    auto [it, inserted] = pending_.try_emplace(std::string(owner));
    Entry& e = it->second;
    if (inserted) {
      e.owner = std::string(owner);
      e.first_line = line;
    }
    if (list_form ? e.has_poset : e.has_list)
      throw Error(ErrorCode::SyntaxError, line,
                  "'" + std::string(owner) + "' mixes list form with accept/cover form");
    if (!list_form) e.has_poset = true;
    return e;
  }

  std::vector<std::string> names_;
  std::map<std::string, std::size_t> declared_;
  std::map<std::string, Entry> pending_;
};

inline HousingMarket MarketBuilder::build() const {
  if (names_.empty()) throw Error(ErrorCode::SyntaxError, "a market needs at least one agent");
  auto resolve = [&](const std::string& name, std::size_t line) {
    auto it = declared_.find(name);
    if (it == declared_.end())
      throw Error(ErrorCode::UnknownAgent, line, "undeclared agent '" + name + "'");
    return agent_id(it->second);
  };
  for (const auto& [owner, e] : pending_) resolve(owner, e.first_line);

  std::vector<PreferencePoset> prefs;
  prefs.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const AgentId owner = agent_id(i);
    auto it = pending_.find(names_[i]);
    if (it == pending_.end()) {
      prefs.push_back(PreferencePoset::build(owner, {}, {}, &names_));
      continue;
    }
    const Entry& e = it->second;
    try {
      if (e.has_list) {
        std::vector<std::vector<AgentId>> classes;
        for (const auto& cls : e.list) {
          std::vector<AgentId> ids;
          for (const auto& h : cls)
            ids.push_back(h == kSelf ? owner : resolve(h, e.list_line));
          classes.push_back(std::move(ids));
        }
        prefs.push_back(PreferencePoset::from_classes(owner, classes, &names_));
      } else {
        std::vector<AgentId> acceptable;
        auto house = [&](const std::string& h, std::size_t line) {
          return h == kSelf ? owner : resolve(h, line);
        };
        for (const auto& h : e.accept) acceptable.push_back(house(h.name, h.line));
        std::vector<std::pair<AgentId, AgentId>> relations;
        for (const auto& r : e.relations)
          relations.emplace_back(house(r.worse, r.line), house(r.better, r.line));
        prefs.push_back(PreferencePoset::build(owner, std::move(acceptable), relations, &names_));
      }
    } catch (const Error& err) {
      if (err.line() != 0 || e.first_line == 0) throw;
      throw Error(err.code(), e.first_line, err.detail());
    }
  }
  return HousingMarket(names_, std::move(prefs));
}

}  // namespace coremarket

#endif  // COREMARKET_MARKET_HPP
