#include "psl/attraction.hpp"

#include <algorithm>
#include <cmath>

#include "psl/error.hpp"

namespace psl {

std::vector<AttractionMap::Entry> AttractionMap::sorted_entries() const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [k, eta] : entries_)
    out.push_back({static_cast<std::uint32_t>(k >> 32),
                   static_cast<std::uint32_t>(k & 0xffffffffu), eta});
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return out;
}

AttractionMap local_attraction(const Graph& g) {
  AttractionMap map;
  if (g.node_count() == 0) return map;
  const std::uint32_t k_max = g.max_degree();
  if (k_max == 0) return map;  // no edges, no common neighbors
  const double denom = std::log(static_cast<double>(k_max) + 1.0);

  // Sweep shared neighbors k in ascending order; each pair accumulates its
  // factor product in that same order, which the brute-force recomputation
  // (sorted intersection) reproduces exactly.
  auto& entries = map.raw();
  const auto n = static_cast<std::uint32_t>(g.node_count());
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto& nbrs = g.neighbors(k);
    if (nbrs.size() < 2) continue;
    const double factor = std::log(static_cast<double>(g.degree(k)) + 1.0) / denom;
    for (std::size_t a = 0; a + 1 < nbrs.size(); ++a)
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        auto [it, inserted] = entries.try_emplace(AttractionMap::key(nbrs[a], nbrs[b]), 1.0);
        it->second *= factor;
      }
  }
  for (auto& [key, v] : entries) v = 1.0 - v;
  return map;
}

}  // namespace psl
