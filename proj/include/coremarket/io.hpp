#ifndef COREMARKET_IO_HPP
#define COREMARKET_IO_HPP

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coremarket/allocation.hpp"
#include "coremarket/error.hpp"
#include "coremarket/market.hpp"
#include "coremarket/reductions.hpp"
#include "coremarket/roommates.hpp"

namespace coremarket {

namespace detail {

struct SourceLine {
  std::size_t number;
  std::vector<std::string> tokens;
};

inline bool is_punct(char c) { return c == ':' || c == '<' || c == '>' || c == '[' || c == ']'; }

// Splits into non-empty, comment-free lines of tokens. With `punct`, the
// characters : < > [ ] are tokens of their own even without spaces.
inline std::vector<SourceLine> tokenize(std::string_view text, bool punct) {
  std::vector<SourceLine> out;
  std::size_t number = 0;
  while (!text.empty()) {
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++number;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    SourceLine sl{number, {}};
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) sl.tokens.push_back(std::move(cur));
      cur.clear();
    };
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        flush();
      } else if (punct && is_punct(c)) {
        flush();
        sl.tokens.emplace_back(1, c);
      } else {
        cur.push_back(c);
      }
    }
    flush();
    if (!sl.tokens.empty()) out.push_back(std::move(sl));
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadParams, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::uint64_t parse_uint(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorCode::SyntaxError, line, "expected a non-negative integer, got '" + s + "'");
  return v;
}

}  // namespace detail

// Reads the line-oriented market format:
//   market v1
//   agent <name>
//   accept <owner> : <house>...
//   cover <owner> : <x> < <y> [< <z> ...]
//   list <owner> : <house> > [<tie> <tie>] > @self
inline HousingMarket parse_market(std::string_view text) {
  auto lines = detail::tokenize(text, true);
  if (lines.empty() || lines[0].tokens != std::vector<std::string>{"market", "v1"})
    throw Error(ErrorCode::SyntaxError, lines.empty() ? 1 : lines[0].number,
                "the first line must be 'market v1'");
  MarketBuilder b;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [ln, t] = lines[k];
    const std::string& kw = t[0];
    if (kw == "agent") {
      if (t.size() != 2) throw Error(ErrorCode::SyntaxError, ln, "expected 'agent <name>'");
      b.add_agent(t[1], ln);
      continue;
    }
    if (kw != "accept" && kw != "cover" && kw != "list")
      throw Error(ErrorCode::SyntaxError, ln, "unknown directive '" + kw + "'");
    if (t.size() < 3 || t[2] != ":")
      throw Error(ErrorCode::SyntaxError, ln, "expected '" + kw + " <owner> : ...'");
    const std::string& owner = t[1];
    std::vector<std::string> rest(t.begin() + 3, t.end());
    if (kw == "accept") {
      for (const auto& h : rest) {
        if (detail::is_punct(h[0]) && h.size() == 1)
          throw Error(ErrorCode::SyntaxError, ln, "unexpected '" + h + "' in accept line");
        b.accept(owner, h, ln);
      }
    } else if (kw == "cover") {
      if (rest.size() < 3 || rest.size() % 2 == 0)
        throw Error(ErrorCode::SyntaxError, ln, "expected 'cover <owner> : x < y'");
      for (std::size_t i = 0; i < rest.size(); ++i) {
        bool want_lt = i % 2 == 1;
        if ((rest[i] == "<") != want_lt)
          throw Error(ErrorCode::SyntaxError, ln, "expected 'cover <owner> : x < y'");
      }
      for (std::size_t i = 0; i + 2 < rest.size(); i += 2) b.prefer(owner, rest[i], rest[i + 2], ln);
    } else {
      std::vector<std::vector<std::string>> classes;
      bool in_tie = false, need_item = true;
      for (const auto& tok : rest) {
        if (tok == "[") {
          if (in_tie || !need_item) throw Error(ErrorCode::SyntaxError, ln, "misplaced '['");
          in_tie = true;
          classes.emplace_back();
        } else if (tok == "]") {
          if (!in_tie || classes.back().empty())
            throw Error(ErrorCode::SyntaxError, ln, "misplaced ']'");
          in_tie = false;
          need_item = false;
        } else if (tok == ">") {
          if (in_tie || need_item) throw Error(ErrorCode::SyntaxError, ln, "misplaced '>'");
          need_item = true;
        } else if (tok == "<" || tok == ":") {
          throw Error(ErrorCode::SyntaxError, ln, "unexpected '" + tok + "' in list");
        } else if (in_tie) {
          classes.back().push_back(tok);
        } else {
          if (!need_item) throw Error(ErrorCode::SyntaxError, ln, "missing '>' before '" + tok + "'");
          classes.push_back({tok});
          need_item = false;
        }
      }
      if (in_tie || (need_item && !classes.empty()))
        throw Error(ErrorCode::SyntaxError, ln, "incomplete list");
      b.set_list(owner, std::move(classes), ln);
    }
  }
  return b.build();
}

inline HousingMarket read_market(const std::string& path) { return parse_market(detail::read_file(path)); }

// Canonical poset form: agents in ordinal order, then per agent an accept line
// (houses by ordinal, own house omitted) and its covers sorted by ordinals.
inline std::string serialize_market(const HousingMarket& h) {
  std::string out = "market v1\n";
  for (const auto& n : h.names()) out += "agent " + n + "\n";
  for (std::size_t a = 0; a < h.agent_count(); ++a) {
    const AgentId owner = agent_id(a);
    const PreferencePoset& p = h.prefs(owner);
    if (p.acceptable_count() > 1) {
      out += "accept " + h.name(owner) + " :";
      for (AgentId x : p.acceptable())
        if (x != owner) out += " " + h.name(x);
      out += "\n";
    }
    for (auto [worse, better] : p.covers())
      out += "cover " + h.name(owner) + " : " + h.name(worse) + " < " + h.name(better) + "\n";
  }
  return out;
}

// Lines `a -> b`. Agents without a line keep their own house.
inline Allocation parse_allocation(std::string_view text, const HousingMarket& h) {
  std::vector<AgentId> target(h.agent_count(), kNoAgent);
  for (const auto& [ln, t] : detail::tokenize(text, false)) {
    if (t.size() != 3 || t[1] != "->") throw Error(ErrorCode::SyntaxError, ln, "expected 'a -> b'");
    auto a = h.find(t[0]), b = h.find(t[2]);
    if (!a || !b) throw Error(ErrorCode::UnknownAgent, ln, "unknown agent in '" + t[0] + " -> " + t[2] + "'");
    if (target[index(*a)] != kNoAgent)
      throw Error(ErrorCode::InvalidAllocation, ln, "'" + t[0] + "' is assigned twice");
    target[index(*a)] = *b;
  }
  for (std::size_t i = 0; i < target.size(); ++i)
    if (target[i] == kNoAgent) target[i] = agent_id(i);
  Allocation x(std::move(target));
  validate_allocation(h, x);
  return x;
}

inline std::string serialize_allocation(const HousingMarket& h, const Allocation& x) {
  std::string out;
  for (std::size_t a = 0; a < h.agent_count(); ++a)
    out += h.name(agent_id(a)) + " -> " + h.name(x[agent_id(a)]) + "\n";
  return out;
}

// Lines `a -- b`; unlisted agents are unmatched.
inline Matching parse_matching(std::string_view text, const RoommatesInstance& inst) {
  Matching m(inst.agent_count());
  const HousingMarket& h = inst.market();
  for (const auto& [ln, t] : detail::tokenize(text, false)) {
    if (t.size() != 3 || t[1] != "--") throw Error(ErrorCode::SyntaxError, ln, "expected 'a -- b'");
    auto a = h.find(t[0]), b = h.find(t[2]);
    if (!a || !b) throw Error(ErrorCode::UnknownAgent, ln, "unknown agent in '" + t[0] + " -- " + t[2] + "'");
    if (*a == *b || m.matched(*a) || m.matched(*b))
      throw Error(ErrorCode::InvalidMatching, ln, "pair '" + t[0] + " -- " + t[2] + "' overlaps another");
    m.match(*a, *b);
  }
  validate_matching(inst, m);
  return m;
}

inline std::string serialize_matching(const RoommatesInstance& inst, const Matching& m) {
  std::string out;
  for (auto [a, b] : m.pairs()) out += inst.name(a) + " -- " + inst.name(b) + "\n";
  return out;
}

// First line `n m`, then m lines `u v`, vertices 1..n.
inline Digraph parse_digraph(std::string_view text) {
  auto lines = detail::tokenize(text, false);
  if (lines.empty() || lines[0].tokens.size() != 2)
    throw Error(ErrorCode::SyntaxError, lines.empty() ? 1 : lines[0].number, "expected 'n m'");
  const std::size_t n = detail::parse_uint(lines[0].tokens[0], lines[0].number);
  const std::size_t m = detail::parse_uint(lines[0].tokens[1], lines[0].number);
  if (lines.size() != m + 1)
    throw Error(ErrorCode::SyntaxError, lines.back().number,
                "expected " + std::to_string(m) + " arc lines, found " + std::to_string(lines.size() - 1));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [ln, t] = lines[k];
    if (t.size() != 2) throw Error(ErrorCode::SyntaxError, ln, "expected 'u v'");
    std::uint64_t u = detail::parse_uint(t[0], ln), v = detail::parse_uint(t[1], ln);
    if (u < 1 || u > n || v < 1 || v > n)
      throw Error(ErrorCode::InvalidDigraph, ln, "vertex out of range 1.." + std::to_string(n));
    arcs.emplace_back(static_cast<std::uint32_t>(u - 1), static_cast<std::uint32_t>(v - 1));
  }
  return Digraph::make(n, std::move(arcs));
}

inline std::string serialize_digraph(const Digraph& d) {
  std::string out = std::to_string(d.n) + " " + std::to_string(d.arcs.size()) + "\n";
  for (auto [u, v] : d.arcs) out += std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
  return out;
}

}  // namespace coremarket

#endif  // COREMARKET_IO_HPP
