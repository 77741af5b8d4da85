#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace psl {

// Index pair with i < j.
using Edge = std::pair<std::uint32_t, std::uint32_t>;
using EdgeList = std::vector<Edge>;

inline Edge make_edge(std::uint32_t a, std::uint32_t b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

// Immutable undirected simple graph. Node indices are dense 0..n-1 in
// first-appearance order of the input labels; adjacency lists are sorted
// and hold no self-loops or duplicates. Safe to read from many threads.
class Graph {
 public:
  Graph() = default;  // empty graph; populate via from_edges/load_edge_list

  // Builds from raw index pairs: drops self-loops, merges duplicate and
  // reversed edges. `labels` fixes the node count.
  static Graph from_edges(std::vector<std::string> labels, const EdgeList& pairs);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  const std::vector<std::uint32_t>& neighbors(std::uint32_t i) const {
    return adjacency_[i];
  }
  std::uint32_t degree(std::uint32_t i) const {
    return static_cast<std::uint32_t>(adjacency_[i].size());
  }
  const std::vector<std::uint32_t>& degrees() const { return degrees_; }
  std::uint32_t max_degree() const { return max_degree_; }

  bool has_edge(std::uint32_t i, std::uint32_t j) const;

  // All edges, i < j, lexicographic.
  EdgeList edges() const;

  // Number of unordered node pairs n(n-1)/2.
  std::uint64_t pair_count() const {
    const std::uint64_t n = node_count();
    return n * (n - 1) / 2;
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::uint32_t i) const { return labels_[i]; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::vector<std::uint32_t> degrees_;
  std::size_t edge_count_ = 0;
  std::uint32_t max_degree_ = 0;
};

struct LoadOptions {
  std::string comment_prefix = "#";
};

// Reads a whitespace edge list: one edge per line, first two tokens are node
// labels, extra tokens ignored, comment lines and blank lines skipped.
// Directed input is symmetrized (an edge appearing in either or both
// orientations becomes one undirected edge). Throws ParseError with the line
// number on a one-token line, DataError if no edges remain after cleanup.
Graph load_edge_list(std::istream& in, const LoadOptions& options = {});
Graph load_edge_list_file(const std::string& path, const LoadOptions& options = {});

struct SplitResult {
  Graph train;
  EdgeList removed;  // test positives
  std::uint64_t seed = 0;
};

// Removes round(ratio*m) edges uniformly at random without replacement
// (round half away from zero) and rebuilds the train graph from the rest.
// All nodes are kept; isolated train nodes are allowed. Deterministic for
// fixed (g, ratio, seed). Throws DataError when no edge would be removed.
SplitResult split_edges(const Graph& g, double ratio, std::uint64_t seed);

// Uniform sample without replacement from the non-edges of g, minus
// `exclude`. Deterministic for fixed inputs. Throws DataError when count
// exceeds the available non-edges.
EdgeList sample_negative_edges(const Graph& g, std::size_t count,
                               std::uint64_t seed,
                               const EdgeList& exclude = {});

inline constexpr std::uint64_t kDefaultPairBudget = 5'000'000;

// All non-edges of g, i < j, lexicographic. Throws DataError when n(n-1)/2
// exceeds the budget; callers should sample instead.
EdgeList enumerate_negative_edges(const Graph& g,
                                  std::uint64_t max_pairs = kDefaultPairBudget);

// Uniform sample of `count` unordered pairs over n nodes, excluding the
// sorted pair list `exclude`. Shared machinery behind negative-edge and
// zero-attraction-pair sampling.
EdgeList sample_pairs_excluding(std::size_t n, std::size_t count,
                                std::uint64_t seed, const EdgeList& exclude);

// Serializes pairs in the edge-list text format, one `label_i label_j` line
// per edge, preceded by `# ` comment lines from `header`.
void write_edge_list(std::ostream& out, const EdgeList& pairs,
                     const std::vector<std::string>& labels,
                     const std::vector<std::string>& header = {});

}  // namespace psl
