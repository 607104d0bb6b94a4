// coremarket: command-line front end. Exit codes: 0 success or positive
// verdict, 1 negative verdict, 2 bad input or failed precondition.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coremarket/coremarket.hpp"

namespace cm = coremarket;
using ojson = nlohmann::ordered_json;

namespace {

struct Globals {
  bool json = false;
  unsigned threads = 1;
};

cm::OracleOptions oracle_options(const Globals& g) {
  cm::OracleOptions o;
  o.threads = g.threads;
  if (const char* env = std::getenv("COREMARKET_ORACLE_CAP")) {
    try {
      o.cap = static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      throw cm::Error(cm::ErrorCode::BadParams, "COREMARKET_ORACLE_CAP must be a number");
    }
  }
  return o;
}

ojson allocation_json(const cm::HousingMarket& h, const cm::Allocation& x) {
  ojson j = ojson::object();
  for (std::size_t a = 0; a < h.agent_count(); ++a) j[h.name(cm::agent_id(a))] = h.name(x[cm::agent_id(a)]);
  return j;
}

ojson matching_json(const cm::RoommatesInstance& r, const cm::Matching& m) {
  ojson j = ojson::array();
  for (auto [a, b] : m.pairs()) j.push_back({r.name(a), r.name(b)});
  return j;
}

std::string names_of(const cm::HousingMarket& h, const std::vector<cm::AgentId>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + h.name(v[i]);
  return s;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cm::Error(cm::ErrorCode::BadParams, "cannot write '" + path + "'");
  out << text;
}

cm::RoommatesInstance read_roommates(const std::string& path) {
  return cm::RoommatesInstance(cm::read_market(path));
}

int verdict(bool positive) { return positive ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Housing markets with partial-order preferences: TTC, core checks, core repair under "
               "improvement, stable roommates, brute-force oracles and reduction gadgets."};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable JSON (one object per line)");
  app.add_option("--threads", g.threads, "Worker threads for oracle enumeration")->check(CLI::Range(1u, 256u));

  int code = 0;
  std::function<void()> action;

  // validate
  std::string market_file;
  auto* validate = app.add_subcommand("validate", "Parse and validate a market file");
  validate->add_option("market", market_file, "Market file")->required();
  validate->callback([&] {
    action = [&] {
      auto h = cm::read_market(market_file);
      bool strict = true, weak = true;
      for (std::size_t a = 0; a < h.agent_count(); ++a) {
        strict = strict && h.prefs(cm::agent_id(a)).is_strict_order();
        weak = weak && h.prefs(cm::agent_id(a)).is_weak_order();
      }
      const char* kind = strict ? "strict" : weak ? "weak" : "poset";
      if (g.json) {
        std::cout << ojson{{"valid", true},
                           {"agents", h.agent_count()},
                           {"arcs", h.arc_count()},
                           {"size", h.description_size()},
                           {"preferences", kind}}
                         .dump()
                  << "\n";
      } else {
        std::cout << "valid market: " << h.agent_count() << " agents, " << h.arc_count()
                  << " acceptability arcs (loops included), |H| = " << h.description_size() << ", " << kind
                  << " preferences\n";
      }
    };
  });

  // ttc
  bool certify = false;
  auto* ttc = app.add_subcommand("ttc", "Compute a core allocation with top trading cycles");
  ttc->add_option("market", market_file, "Market file")->required();
  ttc->add_flag("--certify", certify, "Re-check core membership of the output");
  ttc->callback([&] {
    action = [&] {
      auto h = cm::read_market(market_file);
      auto x = cm::ttc(h);
      if (certify && !cm::check_core(h, x).in_core()) throw std::logic_error("ttc output is blocked");
      if (g.json)
        std::cout << allocation_json(h, x).dump() << "\n";
      else
        std::cout << cm::serialize_allocation(h, x);
    };
  });

  // check
  std::string alloc_file;
  bool strict_check = false;
  auto* check = app.add_subcommand("check", "Check whether an allocation is in the core");
  check->add_option("market", market_file, "Market file")->required();
  check->add_option("allocation", alloc_file, "Allocation file (lines 'a -> b')")->required();
  check->add_flag("--strict", strict_check, "Check the strict core instead");
  check->callback([&] {
    action = [&] {
      auto h = cm::read_market(market_file);
      auto x = cm::parse_allocation(cm::detail::read_file(alloc_file), h);
      auto v = strict_check ? cm::check_strict_core(h, x) : cm::check_core(h, x);
      const char* what = strict_check ? "strict core" : "core";
      if (g.json) {
        ojson cyc = ojson::array();
        for (auto a : v.blocking_cycle) cyc.push_back(h.name(a));
        std::cout << ojson{{"in_core", v.in_core()}, {"strict", strict_check}, {"blocking_cycle", cyc}}.dump()
                  << "\n";
      } else if (v.in_core()) {
        std::cout << "in " << what << "\n";
      } else {
        std::cout << "blocked (" << what << "): " << names_of(h, v.blocking_cycle, " -> ") << " -> "
                  << h.name(v.blocking_cycle.front()) << "\n";
      }
      code = verdict(v.in_core());
    };
  });

  // hm-improve
  std::string h2_file, p_name, q_name, matching_file;
  auto* hm = app.add_subcommand("hm-improve", "Repair a core allocation after agent p improved");
  hm->add_option("H", market_file, "Original market")->required();
  hm->add_option("H2", h2_file, "Improved market")->required();
  hm->add_option("--p", p_name, "Improved agent")->required();
  hm->add_option("--allocation", alloc_file, "Core allocation of H")->required();
  hm->callback([&] {
    action = [&] {
      auto h = cm::read_market(market_file);
      auto h2 = cm::read_market(h2_file);
      auto x = cm::parse_allocation(cm::detail::read_file(alloc_file), h);
      auto r = cm::hm_improve_traced(h, h2, h.agent(p_name), x);
      if (g.json)
        std::cout << ojson{{"allocation", allocation_json(h2, r.allocation)},
                           {"unchanged", r.unchanged},
                           {"iterations", r.iterations}}
                         .dump()
                  << "\n";
      else
        std::cout << cm::serialize_allocation(h2, r.allocation);
    };
  });

  // sr-solve
  auto* srs = app.add_subcommand("sr-solve", "Find a stable roommates matching");
  srs->add_option("instance", market_file, "Instance (market file with symmetric strict lists)")->required();
  srs->callback([&] {
    action = [&] {
      auto r = read_roommates(market_file);
      auto m = cm::find_stable(r);
      if (g.json) {
        std::cout << ojson{{"stable_matching_exists", m.has_value()},
                           {"matching", m ? matching_json(r, *m) : ojson(nullptr)}}
                         .dump()
                  << "\n";
      } else if (m) {
        std::cout << cm::serialize_matching(r, *m);
      } else {
        std::cout << "no stable matching\n";
      }
      code = verdict(m.has_value());
    };
  });

  // sr-improve
  auto* sri = app.add_subcommand("sr-improve", "Stable matching of H2 that keeps p at least as well off");
  sri->add_option("H", market_file, "Original instance")->required();
  sri->add_option("H2", h2_file, "Instance after the (p, q)-improvement")->required();
  sri->add_option("--p", p_name, "Improved agent")->required();
  sri->add_option("--q", q_name, "Agent whose list changed")->required();
  sri->add_option("--matching", matching_file, "Stable matching of H (lines 'a -- b')")->required();
  sri->callback([&] {
    action = [&] {
      auto h = read_roommates(market_file);
      auto h2 = read_roommates(h2_file);
      auto m = cm::parse_matching(cm::detail::read_file(matching_file), h);
      auto out = cm::sr_improve(h, h2, h.market().agent(p_name), h.market().agent(q_name), m);
      if (g.json) {
        std::cout << ojson{{"stable_matching_exists", out.has_value()},
                           {"matching", out ? matching_json(h2, *out) : ojson(nullptr)}}
                         .dump()
                  << "\n";
      } else if (out) {
        std::cout << cm::serialize_matching(h2, *out);
      } else {
        std::cout << "no stable matching\n";
      }
      code = verdict(out.has_value());
    };
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact answers by exhaustive enumeration (small markets)");
  oracle->require_subcommand(1);
  std::string from_name, to_name, agent_name, kind_name;
  bool with_strict = false;

  auto* ocore = oracle->add_subcommand("core", "List every core allocation");
  ocore->add_option("market", market_file, "Market file")->required();
  ocore->add_flag("--strict", with_strict, "List the strict core instead");
  ocore->callback([&] {
    action = [&] {
      auto h = cm::read_market(market_file);
      auto o = oracle_options(g);
      o.strict_core = with_strict;
      auto s = cm::enumerate_core(h, o);
      const auto& list = with_strict ? s.strict_core : s.core;
      for (const auto& x : list) {
        if (g.json) {
          std::cout << allocation_json(h, x).dump() << "\n";
        } else {
          std::string line;
          for (const auto& c : x.cycles())
            if (c.size() > 1) line += (line.empty() ? "" : " ") + ("(" + names_of(h, c, " ") + ")");
          std::cout << (line.empty() ? "(no trade)" : line) << "\n";
        }
      }
      if (!g.json)
        std::cout << "# " << list.size() << (with_strict ? " strict core" : " core") << " allocations, OPT = "
                  << s.opt << "\n";
    };
  });

  auto arc_cmd = [&](const char* name, const char* help, bool forbidden) {
    auto* c = oracle->add_subcommand(name, help);
    c->add_option("market", market_file, "Market file")->required();
    c->add_option("--from", from_name, "Arc tail")->required();
    c->add_option("--to", to_name, "Arc head")->required();
    c->callback([&, forbidden] {
      action = [&, forbidden] {
        auto h = cm::read_market(market_file);
        auto a = h.agent(from_name), b = h.agent(to_name);
        bool r = forbidden ? cm::forbidden_arc_in_core(h, a, b, oracle_options(g))
                           : cm::arc_in_core(h, a, b, oracle_options(g));
        if (g.json)
          std::cout << ojson{{"answer", r}}.dump() << "\n";
        else
          std::cout << (r ? "yes" : "no") << "\n";
        code = verdict(r);
      };
    });
  };
  arc_cmd("arc-in-core", "Does some core allocation contain the arc?", false);
  arc_cmd("forbidden-arc", "Does some core allocation avoid the arc?", true);

  auto* otrade = oracle->add_subcommand("agent-trading", "Can the agent trade in some core allocation?");
  otrade->add_option("market", market_file, "Market file")->required();
  otrade->add_option("--agent", agent_name, "Agent")->required();
  otrade->callback([&] {
    action = [&] {
      auto h = cm::read_market(market_file);
      bool r = cm::agent_trading(h, h.agent(agent_name), oracle_options(g));
      if (g.json)
        std::cout << ojson{{"answer", r}}.dump() << "\n";
      else
        std::cout << (r ? "yes" : "no") << "\n";
      code = verdict(r);
    };
  });

  auto* omax = oracle->add_subcommand("max-core", "Most trading agents over core allocations");
  omax->add_option("market", market_file, "Market file")->required();
  omax->callback([&] {
    action = [&] {
      auto h = cm::read_market(market_file);
      auto [opt, x] = cm::max_core(h, oracle_options(g));
      if (g.json)
        std::cout << ojson{{"opt", opt}, {"allocation", allocation_json(h, x)}}.dump() << "\n";
      else
        std::cout << "OPT = " << opt << "\n" << cm::serialize_allocation(h, x);
    };
  });

  auto* osi = oracle->add_subcommand("strict-improvement",
                                     "Does p's best (B) or worst (W) core house possibly (P) or necessarily (N) "
                                     "get strictly better?");
  osi->add_option("H", market_file, "Original market")->required();
  osi->add_option("H2", h2_file, "Improved market")->required();
  osi->add_option("--p", p_name, "Improved agent")->required();
  osi->add_option("--kind", kind_name, "PSIB, NSIB, PSIW or NSIW")
      ->required()
      ->check(CLI::IsMember({"PSIB", "NSIB", "PSIW", "NSIW"}));
  osi->callback([&] {
    action = [&] {
      auto h = cm::read_market(market_file);
      auto h2 = cm::read_market(h2_file);
      auto kind = kind_name == "PSIB"   ? cm::StrictImprovementKind::PSIB
                  : kind_name == "NSIB" ? cm::StrictImprovementKind::NSIB
                  : kind_name == "PSIW" ? cm::StrictImprovementKind::PSIW
                                        : cm::StrictImprovementKind::NSIW;
      bool r = cm::strict_improvement_decide(kind, h, h2, h.agent(p_name), oracle_options(g));
      if (g.json)
        std::cout << ojson{{"answer", r}}.dump() << "\n";
      else
        std::cout << (r ? "yes" : "no") << "\n";
      code = verdict(r);
    };
  });

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instances");
  gen->require_subcommand(1);
  std::string digraph_file, epsilon_text = "1", before_file, after_file;
  std::optional<std::uint64_t> force_k;
  std::uint64_t k_limit = cm::kDefaultKLimit;

  auto emit_gadget = [&](const cm::GadgetMarket& gm) {
    std::cout << "# query arc: " << gm.market.name(gm.from) << " -> " << gm.market.name(gm.to) << "\n"
              << cm::serialize_market(gm.market);
  };
  auto* garc = gen->add_subcommand("arc-in-core", "Market whose arc (a*, b*) is in some core allocation "
                                                  "iff the digraph splits into two acyclic parts");
  garc->add_option("digraph", digraph_file, "Digraph file ('n m' then 'u v' lines)")->required();
  garc->callback([&] {
    action = [&] { emit_gadget(cm::gadget_arc_in_core(cm::parse_digraph(cm::detail::read_file(digraph_file)))); };
  });
  auto* gforb = gen->add_subcommand("forbidden-arc", "Market where some core allocation avoids (a*, s*) iff "
                                                     "the digraph splits into two acyclic parts");
  gforb->add_option("digraph", digraph_file, "Digraph file")->required();
  gforb->callback([&] {
    action = [&] {
      emit_gadget(cm::gadget_forbidden_arc(cm::parse_digraph(cm::detail::read_file(digraph_file))));
    };
  });
  auto* gmax = gen->add_subcommand("maxcore", "Arc-in-core market with (a*, b*) subdivided by K agents");
  gmax->add_option("digraph", digraph_file, "Digraph file")->required();
  gmax->add_option("--epsilon", epsilon_text, "Rational in (0, 1], e.g. 1, 0.5 or 1/2");
  gmax->add_option("--force-k", force_k, "Use this K instead of the formula");
  gmax->add_option("--k-limit", k_limit, "Refuse formula values of K above this");
  gmax->callback([&] {
    action = [&] {
      auto d = cm::parse_digraph(cm::detail::read_file(digraph_file));
      auto h = cm::gadget_maxcore(d, cm::parse_epsilon(epsilon_text), force_k, k_limit);
      std::cout << cm::serialize_market(h);
    };
  });
  auto pair_cmd = [&](const char* name, cm::StrictImprovementKind kind, const char* help) {
    auto* c = gen->add_subcommand(name, help);
    c->add_option("digraph", digraph_file, "Digraph file")->required();
    c->add_option("--before", before_file, "Where to write the market before the improvement")->required();
    c->add_option("--after", after_file, "Where to write the improved market")->required();
    c->callback([&, kind] {
      action = [&, kind] {
        auto d = cm::parse_digraph(cm::detail::read_file(digraph_file));
        auto pair = cm::gadget_strict_improvement(kind, d);
        write_file(before_file, cm::serialize_market(pair.before));
        write_file(after_file, cm::serialize_market(pair.after));
        std::cout << "p = " << pair.after.name(pair.p) << "\n";
      };
    });
  };
  pair_cmd("psib", cm::StrictImprovementKind::PSIB, "Improvement pair for the best-house question");
  pair_cmd("psiw", cm::StrictImprovementKind::PSIW, "Improvement pair for the worst-house question");

  cm::RandomModel model;
  std::string model_name = "strict";
  auto* grand = gen->add_subcommand("random", "Seeded random market");
  grand->add_option("--n", model.n, "Number of agents")->required();
  grand->add_option("--seed", model.seed, "64-bit seed")->required();
  grand->add_option("--model", model_name, "strict, weak or poset")->check(CLI::IsMember({"strict", "weak", "poset"}));
  grand->add_option("--density", model.density, "Probability that a house is acceptable");
  grand->add_option("--tie", model.tie, "weak: probability of joining the previous tie class");
  grand->add_option("--edge", model.edge, "poset: probability of each comparison");
  grand->callback([&] {
    action = [&] {
      model.model = cm::parse_model(model_name);
      std::cout << cm::serialize_market(cm::gen_random(model));
    };
  });

  // bench
  std::vector<std::size_t> sizes{10000, 20000, 40000, 80000};
  std::uint64_t bench_seed = 1;
  int reps = 5;
  auto* bench = app.add_subcommand("bench", "Time ttc and hm-improve on random weak-order markets (CSV)");
  bench->add_option("--sizes", sizes, "Target |H| values")->delimiter(',');
  bench->add_option("--seed", bench_seed, "Seed");
  bench->add_option("--reps", reps, "Repetitions (median reported)")->check(CLI::Range(1, 1000));
  bench->callback([&] {
    action = [&] {
      std::cout << "size,agents,arcs,ttc_ms,hm_improve_ms\n";
      for (std::size_t target : sizes) {
        auto [h, h2, p, x] = cm::scaling_case(target, bench_seed);
        auto median = [&](auto&& f) {
          std::vector<double> t;
          for (int r = 0; r < reps; ++r) {
            auto start = std::chrono::steady_clock::now();
            f();
            t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
          }
          std::sort(t.begin(), t.end());
          return t[t.size() / 2];
        };
        double tt = median([&] { (void)cm::ttc(h); });
        double th = median([&] { (void)cm::hm_improve(h, h2, p, x, {.check_invariants = false}); });
        std::cout << h.description_size() << "," << h.agent_count() << "," << h.arc_count() << "," << tt << ","
                  << th << "\n";
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (action) action();
  } catch (const cm::Error& e) {
    if (g.json)
      std::cout << ojson{{"error", std::string(cm::to_string(e.code()))}, {"message", e.detail()},
                         {"line", e.line()}}
                       .dump()
                << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return code;
}
