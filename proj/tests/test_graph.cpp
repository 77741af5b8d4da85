#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "psl/error.hpp"
#include "psl/graph.hpp"

using namespace psl;

TEST_CASE("load_edge_list merges duplicates and reversed edges") {
  std::istringstream in("a b\nb c\na b\n");
  Graph g = load_edge_list(in);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  CHECK(g.labels() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("load_edge_list drops self-loops and errors on empty result") {
  std::istringstream in("x x\n");
  CHECK_THROWS_AS(load_edge_list(in), DataError);
}

TEST_CASE("load_edge_list reports line numbers for malformed lines") {
  std::istringstream in("a b\nc\n");
  try {
    load_edge_list(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("load_edge_list skips comments and blanks, ignores extra tokens") {
  std::istringstream in("# header\n\na b 1.5 extra\n  \nb c 2\n");
  Graph g = load_edge_list(in);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
}

TEST_CASE("load_edge_list symmetrizes directed input") {
  std::istringstream in("a b\nb a\nc a\n");
  Graph g = load_edge_list(in);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
}

TEST_CASE("karate club loads with expected size") {
  Graph g = load_edge_list_file(testing::data_path("karate.txt"));
  CHECK(g.node_count() == 34);
  CHECK(g.edge_count() == 78);
  CHECK(g.max_degree() == 17);
}

TEST_CASE("graph invariants hold on random graphs") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Graph g = testing::random_graph(40, 0.15, seed);
    std::size_t adjacency_total = 0;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
      const auto& nbrs = g.neighbors(i);
      CHECK(std::is_sorted(nbrs.begin(), nbrs.end()));
      CHECK(std::adjacent_find(nbrs.begin(), nbrs.end()) == nbrs.end());
      adjacency_total += nbrs.size();
      for (std::uint32_t j : nbrs) {
        CHECK(j != i);
        CHECK(g.has_edge(j, i));  // symmetry
      }
      CHECK(g.degree(i) == nbrs.size());
    }
    CHECK(adjacency_total == 2 * g.edge_count());
  }
}

TEST_CASE("split_edges removes round(ratio*m) edges") {
  Graph g = load_edge_list_file(testing::data_path("karate.txt"));
  SplitResult r = split_edges(g, 0.1, 7);
  CHECK(r.removed.size() == 8);
  CHECK(r.train.edge_count() == 70);
  CHECK(r.train.node_count() == 34);

  // round half away from zero: 0.7 * 78 = 54.6 -> 55
  SplitResult r7 = split_edges(g, 0.7, 7);
  CHECK(r7.removed.size() == 55);
}

TEST_CASE("split_edges is deterministic and partitions the edge set") {
  Graph g = testing::random_graph(30, 0.2, 11);
  SplitResult a = split_edges(g, 0.3, 42);
  SplitResult b = split_edges(g, 0.3, 42);
  CHECK(a.removed == b.removed);
  CHECK(a.train.edges() == b.train.edges());

  for (std::uint64_t seed : {1ULL, 5ULL, 99ULL}) {
    SplitResult r = split_edges(g, 0.3, seed);
    EdgeList combined = r.train.edges();
    combined.insert(combined.end(), r.removed.begin(), r.removed.end());
    std::sort(combined.begin(), combined.end());
    CHECK(combined == g.edges());  // disjoint union restores the original
  }
}

TEST_CASE("split_edges rejects ratios that remove nothing") {
  std::istringstream in("a b\nb c\n");
  Graph g = load_edge_list(in);
  CHECK_THROWS_AS(split_edges(g, 0.1, 1), DataError);  // round(0.2) == 0
  CHECK_THROWS_AS(split_edges(g, 1.5, 1), DataError);
  CHECK_THROWS_AS(split_edges(g, 0.0, 1), DataError);
}

TEST_CASE("sample_negative_edges basic cases") {
  // complete graph: no negatives exist
  std::istringstream k4("a b\na c\na d\nb c\nb d\nc d\n");
  Graph complete = load_edge_list(k4);
  CHECK_THROWS_AS(sample_negative_edges(complete, 1, 1), DataError);

  // path a-b-c: the single non-edge is forced
  std::istringstream path("a b\nb c\n");
  Graph p = load_edge_list(path);
  EdgeList negs = sample_negative_edges(p, 1, 123);
  REQUIRE(negs.size() == 1);
  CHECK(negs[0] == Edge{0, 2});

  CHECK(sample_negative_edges(p, 0, 1).empty());
}

TEST_CASE("sample_negative_edges avoids edges, exclusions, and duplicates") {
  Graph g = testing::random_graph(25, 0.2, 3);
  EdgeList exclude = {{0, 1}, {0, 2}, {1, 2}};
  EdgeList sample = sample_negative_edges(g, 50, 9, exclude);
  CHECK(sample.size() == 50);
  std::set<Edge> seen;
  for (const auto& e : sample) {
    CHECK(e.first < e.second);
    CHECK(!g.has_edge(e.first, e.second));
    CHECK(std::find(exclude.begin(), exclude.end(), e) == exclude.end());
    CHECK(seen.insert(e).second);
  }
  CHECK(sample == sample_negative_edges(g, 50, 9, exclude));
}

TEST_CASE("enumerate_negative_edges") {
  std::istringstream k3("a b\nb c\na c\n");
  CHECK(enumerate_negative_edges(load_edge_list(k3)).empty());

  std::istringstream path("a b\nb c\n");
  CHECK(enumerate_negative_edges(load_edge_list(path)) == EdgeList{{0, 2}});

  // star: center 0 with leaves 1..3; non-edges are the leaf pairs
  std::istringstream star("s a\ns b\ns c\n");
  Graph g = load_edge_list(star);
  EdgeList brute;
  for (std::uint32_t i = 0; i < 4; ++i)
    for (std::uint32_t j = i + 1; j < 4; ++j)
      if (!g.has_edge(i, j)) brute.emplace_back(i, j);
  CHECK(enumerate_negative_edges(g) == brute);
  CHECK(brute.size() == 3);

  CHECK_THROWS_AS(enumerate_negative_edges(g, 2), DataError);
}

TEST_CASE("lexicographic order of enumerated non-edges") {
  Graph g = testing::random_graph(20, 0.3, 5);
  EdgeList negs = enumerate_negative_edges(g);
  CHECK(std::is_sorted(negs.begin(), negs.end()));
}

TEST_CASE("write_edge_list serializes with header and reloads") {
  Graph g = testing::random_graph(12, 0.3, 8);
  SplitResult r = split_edges(g, 0.25, 4);
  std::ostringstream out;
  write_edge_list(out, r.removed, g.labels(), {"removed seed=4 ratio=0.25"});
  CHECK(out.str().find("# removed seed=4 ratio=0.25") == 0);

  std::istringstream in(out.str());
  Graph back = load_edge_list(in);
  CHECK(back.edge_count() == r.removed.size());
}

TEST_CASE("derive_seed gives distinct stable streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}
