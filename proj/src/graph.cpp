#include "psl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "psl/error.hpp"
#include "psl/rng.hpp"

namespace psl {

Graph Graph::from_edges(std::vector<std::string> labels, const EdgeList& pairs) {
  Graph g;
  g.labels_ = std::move(labels);
  const std::size_t n = g.labels_.size();
  g.adjacency_.assign(n, {});

  EdgeList cleaned;
  cleaned.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    if (a == b) continue;
    if (a >= n || b >= n) throw DataError("edge endpoint out of range");
    cleaned.push_back(make_edge(a, b));
  }
  std::sort(cleaned.begin(), cleaned.end());
  cleaned.erase(std::unique(cleaned.begin(), cleaned.end()), cleaned.end());

  for (const auto& [i, j] : cleaned) {
    g.adjacency_[i].push_back(j);
    g.adjacency_[j].push_back(i);
  }
  for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());

  g.edge_count_ = cleaned.size();
  g.degrees_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.degrees_[i] = static_cast<std::uint32_t>(g.adjacency_[i].size());
    g.max_degree_ = std::max(g.max_degree_, g.degrees_[i]);
  }
  return g;
}

bool Graph::has_edge(std::uint32_t i, std::uint32_t j) const {
  if (i == j) return false;
  const auto& nbrs = adjacency_[i];
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

EdgeList Graph::edges() const {
  EdgeList out;
  out.reserve(edge_count_);
  for (std::uint32_t i = 0; i < adjacency_.size(); ++i)
    for (std::uint32_t j : adjacency_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// First two whitespace-separated tokens of a line; returns how many were found.
int first_two_tokens(const std::string& line, std::string& a, std::string& b) {
  std::size_t pos = 0;
  int found = 0;
  while (pos < line.size() && found < 2) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    if (pos >= line.size()) break;
    std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos])) ++pos;
    (found == 0 ? a : b) = line.substr(start, pos - start);
    ++found;
  }
  if (found == 2) return 2;
  // Check whether anything remains (token 2 may be missing entirely).
  while (pos < line.size() && is_space(line[pos])) ++pos;
  return found;
}

}  // namespace

Graph load_edge_list(std::istream& in, const LoadOptions& options) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::uint32_t> index_of;
  EdgeList pairs;

  auto intern = [&](const std::string& label) {
    auto [it, inserted] = index_of.emplace(label, static_cast<std::uint32_t>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line, a, b;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r\v\f");
    if (first == std::string::npos) continue;  // blank
    if (!options.comment_prefix.empty() &&
        line.compare(first, options.comment_prefix.size(), options.comment_prefix) == 0)
      continue;
    const int n_tokens = first_two_tokens(line, a, b);
    if (n_tokens < 2) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected at least 2 tokens, got " << n_tokens;
      throw ParseError(msg.str());
    }
    const std::uint32_t ia = intern(a);
    const std::uint32_t ib = intern(b);
    if (ia != ib) pairs.push_back(make_edge(ia, ib));
  }

  Graph g = Graph::from_edges(std::move(labels), pairs);
  if (g.edge_count() == 0) throw DataError("empty graph: no edges after removing self-loops");
  return g;
}

Graph load_edge_list_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list file: " + path);
  try {
    return load_edge_list(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

SplitResult split_edges(const Graph& g, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DataError("removal ratio must be in (0,1)");
  const std::size_t m = g.edge_count();
  // Round half away from zero, e.g. m=78 ratio=0.7 removes 55.
  const std::size_t k = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(m)));
  if (k == 0) throw DataError("removal ratio yields 0 removed edges");

  EdgeList all = g.edges();
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(all.size() - i));
    std::swap(all[i], all[j]);
  }

  SplitResult result;
  result.seed = seed;
  result.removed.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(result.removed.begin(), result.removed.end());
  EdgeList kept(all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  result.train = Graph::from_edges(g.labels(), kept);
  return result;
}

EdgeList sample_pairs_excluding(std::size_t n, std::size_t count,
                                std::uint64_t seed, const EdgeList& exclude) {
  EdgeList excl = exclude;
  std::sort(excl.begin(), excl.end());
  excl.erase(std::unique(excl.begin(), excl.end()), excl.end());

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (excl.size() > total) throw DataError("exclusion list larger than pair universe");
  const std::uint64_t available = total - excl.size();
  if (count > available) {
    std::ostringstream msg;
    msg << "requested " << count << " pairs but only " << available
        << " are available outside the exclusion set";
    throw DataError(msg.str());
  }
  if (count == 0) return {};

  auto excluded = [&](Edge e) {
    return std::binary_search(excl.begin(), excl.end(), e);
  };

  SplitMix64 rng(seed);
  EdgeList out;
  out.reserve(count);

  if (total <= kDefaultPairBudget) {
    EdgeList candidates;
    candidates.reserve(static_cast<std::size_t>(available));
    for (std::uint32_t i = 0; i + 1 < n; ++i)
      for (std::uint32_t j = i + 1; j < n; ++j)
        if (!excluded({i, j})) candidates.emplace_back(i, j);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.next_below(candidates.size() - i));
      std::swap(candidates[i], candidates[j]);
    }
    out.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    // Rejection sampling; the pair universe dwarfs the exclusion set here.
    std::vector<Edge> chosen;
    chosen.reserve(count);
    while (chosen.size() < count) {
      const auto a = static_cast<std::uint32_t>(rng.next_below(n));
      const auto b = static_cast<std::uint32_t>(rng.next_below(n));
      if (a == b) continue;
      const Edge e = make_edge(a, b);
      if (excluded(e)) continue;
      if (std::find(chosen.begin(), chosen.end(), e) != chosen.end()) continue;
      chosen.push_back(e);
    }
    out = std::move(chosen);
  }

  std::sort(out.begin(), out.end());
  return out;
}

EdgeList sample_negative_edges(const Graph& g, std::size_t count,
                               std::uint64_t seed, const EdgeList& exclude) {
  EdgeList excl = g.edges();
  for (Edge e : exclude)
    if (!g.has_edge(e.first, e.second)) excl.push_back(e);
  return sample_pairs_excluding(g.node_count(), count, seed, excl);
}

EdgeList enumerate_negative_edges(const Graph& g, std::uint64_t max_pairs) {
  if (g.pair_count() > max_pairs) {
    std::ostringstream msg;
    msg << "pair universe " << g.pair_count() << " exceeds budget " << max_pairs
        << "; sample negatives instead of enumerating";
    throw DataError(msg.str());
  }
  EdgeList out;
  const auto n = static_cast<std::uint32_t>(g.node_count());
  for (std::uint32_t i = 0; i + 1 < n; ++i) {
    const auto& nbrs = g.neighbors(i);
    auto it = std::upper_bound(nbrs.begin(), nbrs.end(), i);
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (it != nbrs.end() && *it == j) {
        ++it;
        continue;
      }
      out.emplace_back(i, j);
    }
  }
  return out;
}

void write_edge_list(std::ostream& out, const EdgeList& pairs,
                     const std::vector<std::string>& labels,
                     const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << "\n";
  for (const auto& [i, j] : pairs) out << labels[i] << " " << labels[j] << "\n";
}

}  // namespace psl
