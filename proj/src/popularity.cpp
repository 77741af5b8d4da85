#include "psl/popularity.hpp"

#include <algorithm>
#include <cmath>

#include "psl/error.hpp"

namespace psl {

Popularity normalized_popularity(const std::vector<std::uint32_t>& degree) {
  if (degree.empty()) throw DataError("popularity of an empty degree vector");
  const std::uint32_t k_max = *std::max_element(degree.begin(), degree.end());
  const double denom = std::log(static_cast<double>(k_max) + 2.0);
  Popularity p;
  p.pi.resize(degree.size());
  for (std::size_t i = 0; i < degree.size(); ++i)
    p.pi[i] = std::log(static_cast<double>(degree[i]) + 2.0) / denom;
  return p;
}

}  // namespace psl
