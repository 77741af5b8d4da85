#include "psl/objective.hpp"

#include <cmath>
#include <sstream>

#include "psl/error.hpp"

namespace psl {

namespace {

double target_for(ObjectiveModel model, const Popularity& pi, const AttractionMap& eta,
                  std::uint32_t i, std::uint32_t j, double psi) {
  switch (model) {
    case ObjectiveModel::ps:
      return psi / (pi.pi[i] * pi.pi[j]);
    case ObjectiveModel::la:
      return eta.at(i, j);
    case ObjectiveModel::combined:
      return psi * (1.0 + eta.at(i, j)) / (pi.pi[i] * pi.pi[j]);
  }
  return 0.0;
}

[[noreturn]] void throw_nonfinite(std::uint32_t i, std::uint32_t j) {
  std::ostringstream msg;
  msg << "non-finite objective term at pair (" << i << ", " << j << ")";
  throw NumericalError(msg.str());
}

}  // namespace

ObjectiveSpec build_objective(ObjectiveModel model, Norm norm, const Graph& g_train,
                              const Popularity& pi, const AttractionMap& eta,
                              const std::optional<EdgeList>& neg,
                              const ObjectiveParams& params) {
  if (!std::isfinite(params.psi1) || !std::isfinite(params.psi0))
    throw DataError("psi1/psi0 must be finite");
  if (params.lambda < 0.0) throw DataError("lambda must be non-negative");
  if (params.eps <= 0.0) throw DataError("smoothing eps must be positive");

  ObjectiveSpec spec;
  spec.norm = norm;
  spec.lambda = params.lambda;
  spec.eps = params.eps;
  spec.node_count = g_train.node_count();

  if (model == ObjectiveModel::la) {
    // Pairs with positive attraction are always kept; zero-attraction pairs
    // are either enumerated (the remainder of all i<j pairs) or sampled.
    for (const auto& e : eta.sorted_entries())
      if (e.eta > 0.0) spec.positive_terms.push_back({e.i, e.j, e.eta});
    if (neg) {
      for (const auto& [i, j] : *neg) spec.negative_terms.push_back({i, j, 0.0});
    } else {
      const auto n = static_cast<std::uint32_t>(g_train.node_count());
      for (std::uint32_t i = 0; i + 1 < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
          if (!(eta.at(i, j) > 0.0)) spec.negative_terms.push_back({i, j, 0.0});
    }
    return spec;
  }

  for (const auto& [i, j] : g_train.edges())
    spec.positive_terms.push_back({i, j, target_for(model, pi, eta, i, j, params.psi1)});

  EdgeList negatives = neg ? *neg : enumerate_negative_edges(g_train);
  for (const auto& [i, j] : negatives)
    spec.negative_terms.push_back({i, j, target_for(model, pi, eta, i, j, params.psi0)});
  return spec;
}

ObjectiveSpec build_mfc_objective(const Graph& g_train, double lambda) {
  if (lambda < 0.0) throw DataError("lambda must be non-negative");
  if (g_train.edge_count() == 0)
    throw DataError("matrix factorization needs at least one positive edge");
  ObjectiveSpec spec;
  spec.norm = Norm::l2;
  spec.lambda = lambda;
  spec.node_count = g_train.node_count();
  for (const auto& [i, j] : g_train.edges()) spec.positive_terms.push_back({i, j, 1.0});
  return spec;
}

double objective_value_grad(const ObjectiveSpec& spec, const Matrix& X, Matrix& grad) {
  grad.rows = X.rows;
  grad.cols = X.cols;
  grad.data.assign(X.rows * X.cols, 0.0);
  const std::size_t d = X.cols;
  double value = 0.0;

  auto accumulate = [&](const std::vector<PairTerm>& terms) {
    if (spec.norm == Norm::l2) {
      for (const auto& t : terms) {
        const double r = row_dot(X, t.i, t.j) - t.target;
        if (!std::isfinite(r)) throw_nonfinite(t.i, t.j);
        value += 0.5 * r * r;
        double* gi = grad.row(t.i);
        double* gj = grad.row(t.j);
        const double* xi = X.row(t.i);
        const double* xj = X.row(t.j);
        for (std::size_t k = 0; k < d; ++k) {
          gi[k] += r * xj[k];
          gj[k] += r * xi[k];
        }
      }
    } else {
      const double eps2 = spec.eps * spec.eps;
      for (const auto& t : terms) {
        const double r = row_dot(X, t.i, t.j) - t.target;
        if (!std::isfinite(r)) throw_nonfinite(t.i, t.j);
        const double root = std::sqrt(r * r + eps2);
        value += root - spec.eps;
        const double w = r / root;
        double* gi = grad.row(t.i);
        double* gj = grad.row(t.j);
        const double* xi = X.row(t.i);
        const double* xj = X.row(t.j);
        for (std::size_t k = 0; k < d; ++k) {
          gi[k] += w * xj[k];
          gj[k] += w * xi[k];
        }
      }
    }
  };

  accumulate(spec.positive_terms);
  accumulate(spec.negative_terms);

  if (spec.lambda > 0.0) {
    if (spec.norm == Norm::l2) {
      for (std::size_t i = 0; i < X.data.size(); ++i) {
        value += 0.5 * spec.lambda * X.data[i] * X.data[i];
        grad.data[i] += spec.lambda * X.data[i];
      }
    } else {
      const double eps2 = spec.eps * spec.eps;
      for (std::size_t i = 0; i < X.data.size(); ++i) {
        const double root = std::sqrt(X.data[i] * X.data[i] + eps2);
        value += spec.lambda * (root - spec.eps);
        grad.data[i] += spec.lambda * X.data[i] / root;
      }
    }
  }

  if (!std::isfinite(value)) throw NumericalError("non-finite objective value");
  return value;
}

}  // namespace psl
