#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psl/graph.hpp"
#include "psl/matrix.hpp"
#include "psl/objective.hpp"
#include "psl/optimizer.hpp"

namespace psl {

enum class EmbedMode { ps, la, concat, combined, mfc };

const char* to_string(EmbedMode m);
EmbedMode embed_mode_from_string(const std::string& s);

// How negative pairs enter the objective. `automatic` includes every pair
// exactly when n(n-1)/2 <= pair_budget and otherwise samples
// sample_per_edge * m pairs.
struct NegSampling {
  enum class Mode { automatic, all, sampled } mode = Mode::automatic;
  std::uint64_t pair_budget = kDefaultPairBudget;
  double sample_per_edge = 10.0;
};

struct EmbedConfig {
  EmbedMode mode = EmbedMode::concat;
  int dim = 32;
  Norm norm = Norm::l2;
  double psi1 = 1.0;
  double psi0 = 0.0;
  double lambda = 0.0;
  double smoothing_eps = 1e-6;
  NegSampling neg;
  MinimizeOptions opt;
  std::uint64_t seed = 0;
};

struct Embedding {
  Matrix coords;  // one row per node
  EmbedMode kind = EmbedMode::ps;
  std::vector<std::string> labels;
  std::optional<std::vector<double>> pi;  // present for ps/combined kinds

  std::size_t node_count() const { return coords.rows; }
  std::size_t dim() const { return coords.cols; }
};

struct PhaseStats {
  std::string phase;  // "ps", "la", "combined", "mfc"
  double objective_value = 0.0;
  int iterations = 0;
  MinimizeStatus status = MinimizeStatus::converged;
  std::size_t term_count = 0;
  std::vector<double> f_history;  // objective at x0 and after each accepted step
};

struct EmbedStats {
  std::vector<PhaseStats> phases;
};

// Fits node coordinates for the requested mode:
//   ps        minimize the popularity-similarity objective over raw
//             coordinates, then scale row i by pi_i
//   la        minimize the local-attraction objective directly
//   combined  single objective with (1 + eta) folded into the targets,
//             rows scaled by pi_i afterwards
//   concat    independent ps and la runs at dim/2 each (sub-seeds
//             derive_seed(seed, 1) and derive_seed(seed, 2)), rows
//             concatenated
// Initialization is i.i.d. uniform on [-1/(2 sqrt d), +1/(2 sqrt d)] from
// derive_seed(seed, 0). Deterministic: same inputs and seed give a
// bit-identical embedding.
Embedding embed(const Graph& g_train, const EmbedConfig& cfg, EmbedStats* stats = nullptr);

// Matrix-factorization baseline: least squares over positive edges with unit
// targets plus l2 regularization. No popularity scaling.
Embedding baseline_mfc_embed(const Graph& g_train, int dim, double lambda,
                             const MinimizeOptions& opt, std::uint64_t seed,
                             EmbedStats* stats = nullptr);

// Text format: header `# psl-embed v1 dim=<d> kind=<kind>`, then one
// `<label> <v1> ... <vd>` line per node with round-trip-exact floats.
void write_embedding(std::ostream& out, const Embedding& emb);
Embedding read_embedding(std::istream& in);
void write_embedding_file(const std::string& path, const Embedding& emb);
Embedding read_embedding_file(const std::string& path);

// Round-trip-exact decimal formatting used by all text formats.
std::string format_double(double v);

}  // namespace psl
