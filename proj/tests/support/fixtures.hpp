#ifndef COREMARKET_TESTS_FIXTURES_HPP
#define COREMARKET_TESTS_FIXTURES_HPP

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "coremarket/coremarket.hpp"

namespace fx {

using namespace coremarket;

inline HousingMarket market(std::string_view body) {
  return parse_market("market v1\n" + std::string(body));
}

inline Allocation alloc(const HousingMarket& h, std::string_view lines) { return parse_allocation(lines, h); }

inline std::set<std::vector<AgentId>> as_set(const std::vector<Allocation>& xs) {
  std::set<std::vector<AgentId>> s;
  for (const auto& x : xs) s.emplace(x.targets().begin(), x.targets().end());
  return s;
}

inline PreferenceModel model_of(std::size_t i) {
  static constexpr PreferenceModel kModels[] = {PreferenceModel::Strict, PreferenceModel::Weak,
                                                PreferenceModel::Poset};
  return kModels[i % 3];
}

}  // namespace fx

#endif  // COREMARKET_TESTS_FIXTURES_HPP
