#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "psl/embedding.hpp"
#include "psl/graph.hpp"
#include "psl/nn.hpp"

namespace psl {

// Per-feature affine normalization fitted on the training set and applied
// at prediction time. Both orders of every pair enter training, so the two
// halves of the statistics are identical and symmetry is preserved.
struct FeatureScale {
  std::vector<double> mean;
  std::vector<double> inv_sd;
};

// Classifier over pair features (x_i, x_j) of length 2d. The first hidden
// layer is 32 regardless of the input width.
struct MlpModel {
  FeedForwardNet net;
  FeatureScale scale;
  std::size_t emb_dim = 0;
  EmbedMode emb_kind = EmbedMode::concat;
};

struct LogRegModel {
  std::vector<double> weights;  // length 2d
  double bias = 0.0;
  FeatureScale scale;
  std::size_t emb_dim = 0;
  EmbedMode emb_kind = EmbedMode::concat;
};

using Model = std::variant<MlpModel, LogRegModel>;

enum class ClassifierKind { mlp, logreg };

struct TrainOptions {
  int epochs = 200;
  int batch = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

// Dot product of the two endpoint rows.
double dot_score(const Embedding& emb, Edge e);

// Trains a classifier to separate positive from negative pairs using
// cross-entropy. Every pair is presented in both orders so the learned
// scorer is exactly symmetric after prediction-time averaging.
// Deterministic for a fixed seed; throws NumericalError on divergence.
Model train_classifier(const Embedding& emb, const EdgeList& positives,
                       const EdgeList& negatives, ClassifierKind kind,
                       const TrainOptions& opts);

struct ScoredEdge {
  Edge e;
  double score;
};
using ScoredEdges = std::vector<ScoredEdge>;

// Positive-class probability averaged over both input orders.
double model_score(const Model& model, const Embedding& emb, Edge e);

ScoredEdges score_edges(const Model& model, const Embedding& emb,
                        const EdgeList& candidates);
ScoredEdges score_edges_dot(const Embedding& emb, const EdgeList& candidates);

// `<label_i>\t<label_j>\t<score>` rows, sorted by descending score
// (ties by index pair).
void write_scored_tsv(std::ostream& out, ScoredEdges scored,
                      const std::vector<std::string>& labels);

// Versioned text container holding layer sizes, parameters, and the header
// of the embedding the model was trained against.
void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);
void write_model_file(const std::string& path, const Model& model);
Model read_model_file(const std::string& path);

std::size_t model_emb_dim(const Model& model);

}  // namespace psl
