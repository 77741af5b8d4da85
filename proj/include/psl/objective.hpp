#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psl/attraction.hpp"
#include "psl/graph.hpp"
#include "psl/matrix.hpp"
#include "psl/popularity.hpp"

namespace psl {

enum class Norm { l2, l1 };

enum class ObjectiveModel { ps, la, combined };

struct PairTerm {
  std::uint32_t i, j;
  double target;
};

struct ObjectiveParams {
  double psi1 = 1.0;
  double psi0 = 0.0;
  double lambda = 0.0;
  double eps = 1e-6;  // pseudo-Huber smoothing width for the l1 norm
};

// Self-contained least-squares/least-deviation problem over node pairs:
//   l2:  1/2 sum (x_i . x_j - t)^2                + lambda/2 sum ||x_i||_2^2
//   l1:  sum  h(x_i . x_j - t)                    + lambda   sum_k h(x_ik)
// with h(u) = sqrt(u^2 + eps^2) - eps smoothing |u| so the smooth line
// search applies. Targets are precomputed constants:
//   ps:        psi_c / (pi_i pi_j)
//   la:        eta_ij
//   combined:  psi_c (1 + eta_ij) / (pi_i pi_j)
// with psi_c = psi1 on positive pairs and psi0 on negative pairs.
struct ObjectiveSpec {
  Norm norm = Norm::l2;
  double lambda = 0.0;
  double eps = 1e-6;
  std::size_t node_count = 0;
  std::vector<PairTerm> positive_terms;
  std::vector<PairTerm> negative_terms;

  std::size_t term_count() const { return positive_terms.size() + negative_terms.size(); }
};

// Assembles the term list for one model over the training graph. `neg` picks
// the negative-pair set: nullopt enumerates it fully (ps/combined: all
// non-edges; la: all zero-attraction pairs), otherwise the provided sample is
// used. For ps/combined `pi` must come from g_train's degrees.
ObjectiveSpec build_objective(ObjectiveModel model, Norm norm, const Graph& g_train,
                              const Popularity& pi, const AttractionMap& eta,
                              const std::optional<EdgeList>& neg,
                              const ObjectiveParams& params);

// Positive-edges-only least squares with unit targets plus the l2
// regularizer (the matrix-factorization baseline).
ObjectiveSpec build_mfc_objective(const Graph& g_train, double lambda);

// Value and gradient of the objective at coordinates X (n x d). Terms are
// accumulated in a fixed order so results are bit-reproducible. Throws
// NumericalError naming the offending pair on non-finite intermediates.
double objective_value_grad(const ObjectiveSpec& spec, const Matrix& X, Matrix& grad);

}  // namespace psl
