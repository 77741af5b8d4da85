#pragma once

#include <span>
#include <string>
#include <vector>

namespace psl {

// Scores assigned to the removed (test-positive) links and to the originally
// non-existing links of one trial.
struct TrialScores {
  std::vector<double> pos;
  std::vector<double> neg;
};

// Ratio of removed links among the top k = |pos| scored links. Ties are
// resolved pessimistically: at equal score, negatives outrank positives.
double tpr(const TrialScores& t);

// Probability that a removed link outranks a non-existing one, ties counted
// half (Mann-Whitney with tie correction); equals pair counting exactly.
double auroc(const TrialScores& t);

enum class AuprScheme { trapezoid, dg_interpolation };

// Area under the precision-recall curve from a descending sweep over the
// distinct scores. `trapezoid` keeps the best precision per recall level and
// integrates linearly; `dg_interpolation` inserts intermediate points at
// every integer true-positive count with linearly interpolated false
// positives (Davis & Goadrich 2006) before integrating.
double aupr(const TrialScores& t, AuprScheme scheme = AuprScheme::trapezoid);

// Regularized incomplete beta I_x(a, b) via the standard continued fraction
// (modified Lentz).
double regularized_incomplete_beta(double x, double a, double b);

// Two-tailed Student-t p-value for statistic t with df degrees of freedom.
double tdist_two_tailed_p(double t, double df);

enum class Better { a, b, none };

struct TTestResult {
  bool significant = false;
  Better better = Better::none;
  double t = 0.0;
  double p = 1.0;
  double mean_diff = 0.0;
};

// Two-tailed paired t-test on per-trial metric samples (higher metric =
// better). When the differences have zero spread the test degenerates to
// mean(d) != 0.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b,
                         double alpha);

// values[network][algorithm] = per-trial metric samples.
struct MetricSamples {
  std::string metric;
  std::vector<std::string> algorithms;
  std::vector<std::string> networks;
  std::vector<std::vector<std::vector<double>>> values;
};

struct RankReport {
  // pairwise[network][a][b] in {+1, 0, -1}: +1 when a significantly beats b.
  std::vector<std::vector<std::vector<int>>> pairwise;
  std::vector<std::vector<double>> network_ranks;  // fractional, 1 = best
  std::vector<double> average_rank;                // per algorithm
};

// Per network: pairwise paired t-tests -> score sums -> fractional ranks;
// ranks averaged across networks (lower is better).
RankReport significant_ranks(const MetricSamples& samples, double alpha = 0.05);

}  // namespace psl
