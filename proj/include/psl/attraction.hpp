#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "psl/graph.hpp"

namespace psl {

// Local attraction between node pairs sharing neighbors:
//   eta_ij = 1 - prod_{k in common(i,j)} log(k_k + 1) / log(k_max + 1)
// Stored sparsely over pairs with at least one common neighbor; every other
// pair has eta = 0. Symmetric by construction, values in [0, 1).
class AttractionMap {
 public:
  double at(std::uint32_t i, std::uint32_t j) const {
    if (i == j) return 0.0;
    auto it = entries_.find(key(i, j));
    return it == entries_.end() ? 0.0 : it->second;
  }

  bool contains(std::uint32_t i, std::uint32_t j) const {
    return i != j && entries_.count(key(i, j)) > 0;
  }

  std::size_t size() const { return entries_.size(); }

  struct Entry {
    std::uint32_t i, j;
    double eta;
  };

  // Entries sorted by (i, j); use this wherever iteration order matters.
  std::vector<Entry> sorted_entries() const;

  static std::uint64_t key(std::uint32_t i, std::uint32_t j) {
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(i) << 32) | j;
  }

  std::unordered_map<std::uint64_t, double>& raw() { return entries_; }
  const std::unordered_map<std::uint64_t, double>& raw() const { return entries_; }

 private:
  std::unordered_map<std::uint64_t, double> entries_;
};

AttractionMap local_attraction(const Graph& g);

}  // namespace psl
