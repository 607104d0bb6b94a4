#ifndef COREMARKET_REDUCTIONS_HPP
#define COREMARKET_REDUCTIONS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coremarket/error.hpp"
#include "coremarket/market.hpp"
#include "coremarket/oracle.hpp"

namespace coremarket {

// Simple digraph on vertices 0..n-1 (written 1..n in files).
struct Digraph {
  std::size_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;  // sorted

  static Digraph make(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs) {
    for (auto [u, v] : arcs) {
      if (u >= n || v >= n) throw Error(ErrorCode::InvalidDigraph, "arc endpoint out of range");
      if (u == v)
        throw Error(ErrorCode::LoopInDigraph, "loop at vertex " + std::to_string(u + 1));
    }
    std::sort(arcs.begin(), arcs.end());
    if (std::adjacent_find(arcs.begin(), arcs.end()) != arcs.end())
      throw Error(ErrorCode::InvalidDigraph, "repeated arc");
    return Digraph{n, std::move(arcs)};
  }

  bool has_arc(std::uint32_t u, std::uint32_t v) const {
    return std::binary_search(arcs.begin(), arcs.end(), std::make_pair(u, v));
  }
  std::vector<std::uint32_t> out_neighbours(std::uint32_t u) const {
    std::vector<std::uint32_t> out;
    for (auto [a, b] : arcs)
      if (a == u) out.push_back(b);
    return out;
  }
};

// A market together with the arc the decision question is about.
struct GadgetMarket {
  HousingMarket market;
  AgentId from;
  AgentId to;
};

namespace detail {

struct GadgetSpec {
  bool star_second = false;       // a* also accepts s*, as second choice
  bool b_star_accepts_a = true;   // b* lists a* last
  std::uint64_t subdivide = 0;    // agents p1..pK on the arc (a*, b*)
};

inline std::string idx_name(char c, std::size_t i) { return std::string(1, c) + std::to_string(i); }

inline HousingMarket build_gadget(const Digraph& d, const GadgetSpec& spec) {
  const std::size_t n = d.n;
  MarketBuilder b;
  b.add_agent("a*");
  b.add_agent("b*");
  b.add_agent("a0");
  b.add_agent("b0");
  for (std::size_t i = 1; i <= n; ++i)
    for (char c : {'a', 'b', 'c', 'd'}) b.add_agent(idx_name(c, i));
  if (spec.star_second) b.add_agent("s*");
  for (std::uint64_t k = 1; k <= spec.subdivide; ++k) b.add_agent("p" + std::to_string(k));

  auto list = [&](const std::string& owner, const std::vector<std::string>& best_first) {
    std::vector<std::vector<std::string>> classes;
    for (const auto& h : best_first) classes.push_back({h});
    b.set_list(owner, std::move(classes));
  };

  std::vector<std::string> a_star{spec.subdivide ? std::string("p1") : std::string("b*")};
  if (spec.star_second) a_star.push_back("s*");
  list("a*", a_star);
  std::vector<std::string> b_star;
  for (std::size_t i = 0; i <= n; ++i) b_star.push_back(idx_name('a', i));
  if (spec.b_star_accepts_a) b_star.push_back("a*");
  list("b*", b_star);
  for (std::size_t i = 0; i <= n; ++i) list(idx_name('a', i), {idx_name('b', i), "b*"});
  for (std::size_t i = 0; i < n; ++i) list(idx_name('b', i), {idx_name('c', i + 1), idx_name('d', i + 1)});
  list(idx_name('b', n), {"a0"});
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<std::string> c{idx_name('d', i)}, dd{idx_name('c', i)};
    for (std::uint32_t j : d.out_neighbours(static_cast<std::uint32_t>(i - 1))) {
      c.push_back(idx_name('c', j + 1));
      dd.push_back(idx_name('d', j + 1));
    }
    c.push_back(idx_name('a', i));
    dd.push_back(idx_name('a', i));
    list(idx_name('c', i), c);
    list(idx_name('d', i), dd);
  }
  if (spec.star_second) list("s*", {"a*"});
  for (std::uint64_t k = 1; k <= spec.subdivide; ++k)
    list("p" + std::to_string(k), {k == spec.subdivide ? std::string("b*") : "p" + std::to_string(k + 1)});
  return b.build();
}

}  // namespace detail

// D has a partition into two acyclic parts iff some core allocation of the
// returned market contains (a*, b*).
inline GadgetMarket gadget_arc_in_core(const Digraph& d) {
  HousingMarket h = detail::build_gadget(d, {});
  AgentId a = h.agent("a*"), b = h.agent("b*");
  return {std::move(h), a, b};
}

// As above with an extra agent s*, whom only a* accepts (as second choice):
// D is a yes-instance iff some core allocation avoids (a*, s*).
inline GadgetMarket gadget_forbidden_arc(const Digraph& d) {
  HousingMarket h = detail::build_gadget(d, {.star_second = true});
  AgentId a = h.agent("a*"), s = h.agent("s*");
  return {std::move(h), a, s};
}

// Rational in (0, 1].
struct Epsilon {
  std::uint64_t num = 1;
  std::uint64_t den = 1;
};

// Accepts "1", "0.5", "1/2".
inline Epsilon parse_epsilon(std::string_view text) {
  auto bad = [&] { return Error(ErrorCode::BadParams, "epsilon must be a rational in (0, 1], got '" + std::string(text) + "'"); };
  auto digits = [&](std::string_view s) {
    if (s.empty() || s.size() > 9) throw bad();
    std::uint64_t v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') throw bad();
      v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
  };
  Epsilon e;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    e.num = digits(text.substr(0, slash));
    e.den = digits(text.substr(slash + 1));
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    e.den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) e.den *= 10;
    e.num = digits(text.substr(0, dot).empty() ? "0" : text.substr(0, dot)) * e.den + digits(frac);
  } else {
    e.num = digits(text);
    e.den = 1;
  }
  if (e.num == 0 || e.den == 0 || e.num > e.den) throw bad();
  std::uint64_t g = std::gcd(e.num, e.den);
  e.num /= g;
  e.den /= g;
  return e;
}

inline constexpr std::uint64_t kDefaultKLimit = 1'000'000;

// K = ceil((4n+4)^(1/epsilon)). Throws KTooLarge above `limit`.
inline std::uint64_t maxcore_k(std::size_t n, Epsilon eps, std::uint64_t limit = kDefaultKLimit) {
  const std::uint64_t base = 4 * static_cast<std::uint64_t>(n) + 4;
  const long double est = std::pow(static_cast<long double>(base),
                                   static_cast<long double>(eps.den) / static_cast<long double>(eps.num));
  if (!(est <= static_cast<long double>(limit) + 1))
    throw Error(ErrorCode::KTooLarge, "K would be about " + std::to_string(static_cast<double>(est)) +
                                          ", above the limit " + std::to_string(limit) + "; force a smaller K");
  std::uint64_t k = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(est)));

  // Exact correction: K is the least k with k^num >= base^den.
  using u128 = unsigned __int128;
  const u128 sat = ~u128{0} >> 2;
  auto power = [&](std::uint64_t x, std::uint64_t e) {
    u128 r = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
      if (r > sat / (x == 0 ? 1 : x)) return sat;
      r *= x;
    }
    return r;
  };
  const u128 rhs = power(base, eps.den);
  if (rhs < sat) {
    auto enough = [&](std::uint64_t c) {
      u128 l = power(c, eps.num);
      return l >= rhs;
    };
    while (k > 1 && enough(k - 1)) --k;
    while (!enough(k)) ++k;
  }
  if (k > limit)
    throw Error(ErrorCode::KTooLarge, "K = " + std::to_string(k) + " exceeds the limit " + std::to_string(limit));
  return k;
}

// The arc (a*, b*) of the arc-in-core gadget subdivided by K agents. With
// K = maxcore_k(n, eps): yes-instances have a core allocation where everyone
// trades, no-instances leave at most 4n+4 agents trading.
inline HousingMarket gadget_maxcore(const Digraph& d, Epsilon eps,
                                    std::optional<std::uint64_t> force_k = std::nullopt,
                                    std::uint64_t k_limit = kDefaultKLimit) {
  std::uint64_t k = force_k ? *force_k : maxcore_k(d.n, eps, k_limit);
  if (k == 0) throw Error(ErrorCode::BadParams, "K must be at least 1");
  return detail::build_gadget(d, {.subdivide = k});
}

struct ImprovementGadget {
  HousingMarket before;
  HousingMarket after;
  AgentId p;
};

// PSIB: before = arc-in-core gadget without the arc (b*, a*), after = the
// gadget, p = a*. PSIW: before = forbidden-arc gadget without (a*, s*),
// after = that gadget, p = s*.
inline ImprovementGadget gadget_strict_improvement(StrictImprovementKind kind, const Digraph& d) {
  if (kind == StrictImprovementKind::PSIB) {
    HousingMarket before = detail::build_gadget(d, {.b_star_accepts_a = false});
    HousingMarket after = detail::build_gadget(d, {});
    AgentId p = after.agent("a*");
    return {std::move(before), std::move(after), p};
  }
  if (kind == StrictImprovementKind::PSIW) {
    HousingMarket after = detail::build_gadget(d, {.star_second = true});
    HousingMarket before = detail::build_gadget(d, {.star_second = true});
    AgentId a = before.agent("a*"), b = before.agent("b*");
    before = before.with_preferences(a, PreferencePoset::from_list(a, {b}));
    AgentId p = after.agent("s*");
    return {std::move(before), std::move(after), p};
  }
  throw Error(ErrorCode::BadParams, "gadget pairs exist for PSIB and PSIW only");
}

}  // namespace coremarket

#endif  // COREMARKET_REDUCTIONS_HPP
