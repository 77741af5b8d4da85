#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psl/embedding.hpp"
#include "psl/metrics.hpp"
#include "psl/reconstruction.hpp"

namespace psl {

enum class ReconKind { dot, mlp, logreg };

// One evaluated pipeline: an embedding variant plus a reconstruction
// function. Names follow `<embedding>-<reconstruction>-<cost>`:
//   psl-nn-l2   concatenated embedding, l2 cost, neural classifier
//   psl-nn-l1   concatenated embedding, l1 cost, neural classifier
//   psl-nn-co   single combined objective (l2), neural classifier
//   psl-dp-l2   concatenated embedding, l2 cost, dot product
//   mfc-nn      matrix-factorization baseline, neural classifier
// plus ps-*/la-* for the standalone halves and -lr for logistic regression.
struct AlgorithmSpec {
  std::string name;
  EmbedMode mode = EmbedMode::concat;
  Norm norm = Norm::l2;
  ReconKind recon = ReconKind::mlp;
};

AlgorithmSpec parse_algorithm(const std::string& name);

struct ExperimentConfig {
  std::vector<std::string> datasets;
  std::vector<std::string> algorithms = {"psl-nn-l2"};
  int dim = 32;
  double psi1 = 1.0;
  double psi0 = 0.0;
  double lambda = 0.001;
  double smoothing_eps = 1e-6;
  double remove_ratio = 0.1;
  int trials = 100;
  int epochs = 200;
  int batch = 64;
  double lr = 1e-3;
  double train_neg_ratio = 1.0;      // training negatives per positive
  std::uint64_t pair_budget = kDefaultPairBudget;  // enumerate vs sample
  double neg_fraction = 0.001;       // sampled fraction in large mode
  NegSampling emb_neg;               // negative pairs inside the objectives
  int max_iters = 1000;
  double grad_tol = 1e-6;
  std::uint64_t base_seed = 1;
  std::vector<std::string> metrics = {"tpr", "aupr", "auroc"};
  AuprScheme aupr_scheme = AuprScheme::trapezoid;
  std::string output_dir = ".";
  bool large = false;  // logistic regression, 100-iteration cap, 0.1% negatives
};

// Flat key=value text, `#` comments. Keys match the field names above;
// list values are comma-separated.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_file(const std::string& path);
void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value);

struct ResultRow {
  std::string network;
  std::string algorithm;
  int trial = 0;
  std::string metric;
  double value = 0.0;
};

struct TrialFailure {
  std::string network;
  std::string algorithm;
  int trial = 0;
  std::string what;
};

struct ExperimentSummary {
  std::vector<ResultRow> rows;
  std::vector<TrialFailure> failures;
  std::string results_path;
  std::string ranks_path;  // empty when fewer than 2 algorithms
};

// Runs the full removal/embedding/reconstruction/metric pipeline.
//
// Trial t draws everything from seed base_seed + t: the edge split uses it
// directly, and the stages use derive_seed(trial_seed, k) with k = 1 for
// evaluation-negative sampling, 2 for embedding initialization, 3 for
// training-negative sampling, and 4 for classifier shuffling. Trials run in
// a worker pool (PSL_WORKERS env var, default 1) and are bit-reproducible
// regardless of the worker count.
//
// Writes <output_dir>/results.csv and, with two or more algorithms,
// <output_dir>/ranks.csv. Per-trial failures are recorded and skipped; the
// summary lists them.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

// Evaluation scores for one (trial, algorithm) on one network; exposed for
// the `score` pipeline and tests.
void write_results_csv(std::ostream& out, const ExperimentConfig& cfg,
                       const std::vector<ResultRow>& rows,
                       const std::vector<std::pair<std::string, bool>>& eval_paths);
std::vector<ResultRow> read_results_csv(std::istream& in);

// Groups rows of one metric into MetricSamples (algorithms and networks in
// first-appearance order). Throws DataError on inconsistent trial counts.
MetricSamples collect_metric_samples(const std::vector<ResultRow>& rows,
                                     const std::string& metric);

void write_ranks_csv(std::ostream& out, const std::vector<ResultRow>& rows,
                     const std::vector<std::string>& metrics, double alpha);

}  // namespace psl
