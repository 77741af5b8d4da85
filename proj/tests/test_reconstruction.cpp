#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "psl/embedding.hpp"
#include "psl/error.hpp"
#include "psl/nn.hpp"
#include "psl/optimizer.hpp"
#include "psl/reconstruction.hpp"
#include "psl/rng.hpp"

using namespace psl;

namespace {

Embedding make_embedding(std::vector<std::vector<double>> rows,
                         EmbedMode kind = EmbedMode::concat) {
  Embedding e;
  e.kind = kind;
  e.coords = Matrix(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    e.labels.push_back("n" + std::to_string(i));
    for (std::size_t k = 0; k < rows[i].size(); ++k) e.coords.at(i, k) = rows[i][k];
  }
  return e;
}

double accuracy(const Model& model, const Embedding& emb, const EdgeList& pos,
                const EdgeList& neg) {
  std::size_t hits = 0;
  for (const auto& e : pos)
    if (model_score(model, emb, e) > 0.5) ++hits;
  for (const auto& e : neg)
    if (model_score(model, emb, e) < 0.5) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pos.size() + neg.size());
}

}  // namespace

TEST_CASE("dot_score") {
  Embedding e = make_embedding({{1, 2}, {3, 4}, {0, 0}});
  CHECK(dot_score(e, {0, 1}) == 11.0);
  CHECK(dot_score(e, {0, 2}) == 0.0);

  // ps-kind: coords already carry pi, so the score is pi_i pi_j (xt_i . xt_j)
  Embedding ps = make_embedding({{0.8 * 1.0, 0.8 * 1.0}, {0.5 * 1.0, 0.5 * 1.0}},
                                EmbedMode::ps);
  CHECK(dot_score(ps, {0, 1}) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("dot score scales quadratically and preserves ranking") {
  Embedding e = make_embedding({{1, 2}, {3, 4}, {-1, 0.5}, {2, -2}});
  EdgeList candidates = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  ScoredEdges base = score_edges_dot(e, candidates);

  Embedding scaled = e;
  for (double& v : scaled.coords.data) v *= 3.0;
  ScoredEdges after = score_edges_dot(scaled, candidates);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(after[i].score == doctest::Approx(9.0 * base[i].score).epsilon(1e-12));
}

TEST_CASE("logistic regression fits a separable set perfectly") {
  // positives pair up nodes with strongly positive coordinates, negatives the
  // mirrored ones
  Embedding e = make_embedding({{2.0}, {3.0}, {2.5}, {-2.0}, {-3.0}, {-2.5}});
  EdgeList pos = {{0, 1}, {0, 2}, {1, 2}};
  EdgeList neg = {{3, 4}, {3, 5}, {4, 5}};
  Model m = train_classifier(e, pos, neg, ClassifierKind::logreg, {400, 16, 0.05, 1});
  CHECK(accuracy(m, e, pos, neg) == 1.0);
}

TEST_CASE("identical positive and negative features give probability near 1/2") {
  Embedding e = make_embedding({{1.0, -0.5}, {0.25, 2.0}});
  EdgeList pos = {{0, 1}};
  EdgeList neg = {{0, 1}};  // same pair labeled both ways
  Model m = train_classifier(e, pos, neg, ClassifierKind::logreg, {200, 64, 1e-3, 3});
  CHECK(std::fabs(model_score(m, e, {0, 1}) - 0.5) < 0.05);
}

TEST_CASE("mlp separates an xor arrangement") {
  // clusters at (+1,+1) and (-1,-1) are positive pairs, (+1,-1) and (-1,+1)
  // negative; linearly inseparable in the pair feature space
  std::vector<std::vector<double>> rows;
  EdgeList pos, neg;
  SplitMix64 rng(5);
  auto add_node = [&](double v) {
    rows.push_back({v + 0.05 * (2.0 * rng.next_double() - 1.0)});
    return static_cast<std::uint32_t>(rows.size() - 1);
  };
  for (int rep = 0; rep < 30; ++rep) {
    const auto p1 = add_node(1.0), p2 = add_node(1.0);
    const auto m1 = add_node(-1.0), m2 = add_node(-1.0);
    pos.push_back(make_edge(p1, p2));
    pos.push_back(make_edge(m1, m2));
    neg.push_back(make_edge(p1, m2));
    neg.push_back(make_edge(m1, p2));
  }
  Embedding e = make_embedding(rows);
  Model m = train_classifier(e, pos, neg, ClassifierKind::mlp, {500, 64, 3e-3, 2});
  CHECK(accuracy(m, e, pos, neg) > 0.9);
}

TEST_CASE("classifier scores are symmetric probabilities") {
  Graph g = testing::random_graph(12, 0.35, 9);
  EmbedConfig cfg;
  cfg.mode = EmbedMode::concat;
  cfg.dim = 4;
  cfg.seed = 4;
  Embedding e = embed(g, cfg);
  EdgeList pos = g.edges();
  EdgeList neg = sample_negative_edges(g, pos.size(), 6);
  for (ClassifierKind kind : {ClassifierKind::mlp, ClassifierKind::logreg}) {
    Model m = train_classifier(e, pos, neg, kind, {50, 32, 1e-3, 7});
    for (const auto& ed : enumerate_negative_edges(g)) {
      const double s = model_score(m, e, ed);
      const double flipped = model_score(m, e, {ed.second, ed.first});
      CHECK(s == flipped);  // exact, by order averaging
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("training requires both classes and matching dimensions") {
  Embedding e = make_embedding({{1.0}, {2.0}});
  CHECK_THROWS_AS(train_classifier(e, {}, {{0, 1}}, ClassifierKind::logreg, {}),
                  DataError);
  CHECK_THROWS_AS(train_classifier(e, {{0, 1}}, {}, ClassifierKind::logreg, {}),
                  DataError);

  Model m = train_classifier(e, {{0, 1}}, {{0, 1}}, ClassifierKind::logreg, {10, 4, 1e-3, 1});
  Embedding wider = make_embedding({{1.0, 2.0}, {2.0, 1.0}});
  CHECK_THROWS_AS(score_edges(m, wider, {{0, 1}}), DataError);
}

namespace {

// Smallest |pre-activation| over the hidden rectifier units; instances where
// a unit sits at the kink make central differences straddle the
// non-differentiable point and are skipped.
double min_hidden_preactivation(const FeedForwardNet& net,
                                const std::vector<double>& input) {
  const auto& layers = net.layers();
  const auto& p = net.params();
  std::vector<double> a = input;
  std::size_t off = 0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    const int in = layers[l];
    const int out = layers[l + 1];
    std::vector<double> z(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      double s = p[off + static_cast<std::size_t>(in) * out + o];
      for (int i = 0; i < in; ++i)
        s += p[off + static_cast<std::size_t>(o) * in + i] * a[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(o)] = s;
    }
    off += static_cast<std::size_t>(in) * out + out;
    if (l + 2 < layers.size()) {
      for (double v : z) min_abs = std::min(min_abs, std::fabs(v));
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    }
    a = std::move(z);
  }
  return min_abs;
}

}  // namespace

TEST_CASE("mlp backprop matches finite differences on random tiny nets") {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 20 && seed <= 200; ++seed) {
    SplitMix64 rng(seed);
    FeedForwardNet net({3, 5, 4, 2}, seed);
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
    std::vector<std::size_t> idx;
    bool near_kink = false;
    for (std::size_t s = 0; s < 6; ++s) {
      inputs.push_back({2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0,
                        2.0 * rng.next_double() - 1.0});
      labels.push_back(static_cast<int>(rng.next_below(2)));
      idx.push_back(s);
      near_kink = near_kink || min_hidden_preactivation(net, inputs.back()) < 1e-3;
    }
    if (near_kink) continue;

    FeedForwardNet::Workspace ws;
    std::vector<double> grad(net.param_count(), 0.0);
    net.batch_loss_grad(idx, inputs, labels, grad, ws);

    auto loss_at = [&](std::span<const double> params) {
      FeedForwardNet probe = net;
      probe.params().assign(params.begin(), params.end());
      FeedForwardNet::Workspace w2;
      std::vector<double> g2(probe.param_count(), 0.0);
      return probe.batch_loss_grad(idx, inputs, labels, g2, w2);
    };
    const std::vector<double> fd = finite_diff_gradient(loss_at, net.params(), 1e-6);
    for (std::size_t k = 0; k < fd.size(); ++k) {
      const double denom = std::max({std::fabs(grad[k]), std::fabs(fd[k]), 1.0});
      CHECK(std::fabs(grad[k] - fd[k]) / denom < 1e-4);
    }
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("model files round-trip and reproduce scores") {
  Graph g = testing::random_graph(10, 0.4, 12);
  EmbedConfig cfg;
  cfg.mode = EmbedMode::concat;
  cfg.dim = 4;
  cfg.seed = 1;
  Embedding e = embed(g, cfg);
  EdgeList pos = g.edges();
  EdgeList neg = sample_negative_edges(g, pos.size(), 2);

  for (ClassifierKind kind : {ClassifierKind::mlp, ClassifierKind::logreg}) {
    Model m = train_classifier(e, pos, neg, kind, {30, 32, 1e-3, 9});
    std::ostringstream out;
    write_model(out, m);
    std::istringstream in(out.str());
    Model back = read_model(in);
    for (const auto& ed : enumerate_negative_edges(g))
      CHECK(model_score(back, e, ed) == model_score(m, e, ed));
  }
}

TEST_CASE("scored TSV is sorted by descending score") {
  Embedding e = make_embedding({{1.0}, {2.0}, {3.0}, {-1.0}});
  ScoredEdges scored = score_edges_dot(e, {{0, 1}, {0, 3}, {1, 2}, {0, 2}});
  std::ostringstream out;
  write_scored_tsv(out, scored, e.labels);
  std::istringstream lines(out.str());
  std::string line;
  double prev = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    const auto tab = line.rfind('\t');
    const double v = std::stod(line.substr(tab + 1));
    CHECK(v <= prev);
    prev = v;
    ++count;
  }
  CHECK(count == 4);
}
