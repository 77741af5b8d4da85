#pragma once

#include <string>
#include <vector>

#include "psl/graph.hpp"
#include "psl/rng.hpp"

namespace psl::testing {

// Erdos-Renyi-style random graph over n nodes, each pair kept with
// probability p. Nodes are labeled v0..v{n-1}.
inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
  EdgeList pairs;
  for (std::uint32_t i = 0; i + 1 < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (rng.next_double() < p) pairs.emplace_back(i, j);
  return Graph::from_edges(std::move(labels), pairs);
}

inline std::string data_path(const std::string& name) {
  return std::string(PSL_DATA_DIR) + "/" + name;
}

}  // namespace psl::testing
