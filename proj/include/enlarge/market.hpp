#ifndef ENLARGE_MARKET_HPP_
#define ENLARGE_MARKET_HPP_

#include <optional>
#include <string>
#include <vector>

#include "enlarge/process.hpp"
#include "enlarge/space.hpp"

namespace enlarge {

enum class Enlargement { progressive, initial };

/// A market on an enlarged filtration. `base` carries F, `enlarged` carries
/// G on the same atoms and weights; `traded` are the assets as seen in G
/// (stopped at tau for progressive enlargement, unchanged for initial).
struct GMarket {
  Enlargement kind;
  FinSpace base;
  FinSpace enlarged;
  std::vector<Asset> assets;
  std::vector<Asset> traded;
  std::optional<StoppingMap> tau;
  std::optional<std::vector<std::size_t>> label_of;
};

inline const Asset* find_asset(const std::vector<Asset>& assets, const std::string& name) {
  for (const auto& a : assets)
    if (a.name == name) return &a;
  return nullptr;
}

}  // namespace enlarge

#endif  // ENLARGE_MARKET_HPP_
