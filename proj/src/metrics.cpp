#include "psl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "psl/error.hpp"

namespace psl {

double tpr(const TrialScores& t) {
  if (t.pos.empty()) throw DataError("tpr needs at least one positive score");
  const std::size_t k = t.pos.size();

  // (score, is_positive), sorted so that at equal score negatives come first.
  std::vector<std::pair<double, bool>> items;
  items.reserve(t.pos.size() + t.neg.size());
  for (double s : t.pos) {
    if (!std::isfinite(s)) throw DataError("non-finite score");
    items.emplace_back(s, true);
  }
  for (double s : t.neg) {
    if (!std::isfinite(s)) throw DataError("non-finite score");
    items.emplace_back(s, false);
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;  // negative (false) first
  });

  std::size_t hits = 0;
  for (std::size_t i = 0; i < k && i < items.size(); ++i)
    if (items[i].second) ++hits;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double auroc(const TrialScores& t) {
  if (t.pos.empty() || t.neg.empty())
    throw DataError("auroc needs both positive and negative scores");

  std::vector<std::pair<double, bool>> items;
  items.reserve(t.pos.size() + t.neg.size());
  for (double s : t.pos) items.emplace_back(s, true);
  for (double s : t.neg) items.emplace_back(s, false);
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Rank sum of positives with average ranks over tie groups.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j < items.size() && items[j].first == items[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (items[k].second) pos_rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(t.pos.size());
  const double nn = static_cast<double>(t.neg.size());
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

namespace {

// Cumulative (true positive, false positive) counts at each distinct score
// threshold, descending.
std::vector<std::pair<std::size_t, std::size_t>> pr_sweep(const TrialScores& t) {
  std::vector<std::pair<double, bool>> items;
  items.reserve(t.pos.size() + t.neg.size());
  for (double s : t.pos) items.emplace_back(s, true);
  for (double s : t.neg) items.emplace_back(s, false);
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<std::pair<std::size_t, std::size_t>> points;
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j < items.size() && items[j].first == items[i].first) ++j;
    for (std::size_t k = i; k < j; ++k) (items[k].second ? tp : fp) += 1;
    points.emplace_back(tp, fp);
    i = j;
  }
  return points;
}

double aupr_trapezoid(const TrialScores& t) {
  const auto points = pr_sweep(t);
  const double total_pos = static_cast<double>(t.pos.size());

  // Keep the first (highest-precision) point of each recall level. Points
  // with tp == 0 carry no recall and stay off the curve; the first real point
  // extends flat back to recall 0.
  double area = 0.0;
  double prev_recall = 0.0, prev_precision = 0.0;
  bool have_prev = false;
  std::size_t prev_tp = 0;
  for (const auto& [tp, fp] : points) {
    if (tp == 0) continue;
    if (tp == prev_tp && have_prev) continue;
    const double recall = static_cast<double>(tp) / total_pos;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (!have_prev) {
      area += recall * precision;  // flat extension back to recall 0
      have_prev = true;
    } else {
      area += (recall - prev_recall) * 0.5 * (precision + prev_precision);
    }
    prev_recall = recall;
    prev_precision = precision;
    prev_tp = tp;
  }
  return area;
}

double aupr_dg(const TrialScores& t) {
  const auto points = pr_sweep(t);
  const double total_pos = static_cast<double>(t.pos.size());

  // Walk the sweep keeping the running (tp, fp) state; between states whose
  // tp differs, insert a point at every intermediate integer tp with fp
  // interpolated linearly, then integrate the dense polyline.
  double area = 0.0;
  double prev_recall = 0.0, prev_precision = 0.0;
  bool have_prev = false;
  std::size_t cur_tp = 0, cur_fp = 0;
  for (const auto& [tp, fp] : points) {
    if (tp > cur_tp) {
      const double slope = static_cast<double>(fp - cur_fp) / static_cast<double>(tp - cur_tp);
      for (std::size_t x = cur_tp + 1; x <= tp; ++x) {
        const double fpx =
            static_cast<double>(cur_fp) + slope * static_cast<double>(x - cur_tp);
        const double recall = static_cast<double>(x) / total_pos;
        const double precision = static_cast<double>(x) / (static_cast<double>(x) + fpx);
        if (!have_prev) {
          area += recall * precision;
          have_prev = true;
        } else {
          area += (recall - prev_recall) * 0.5 * (precision + prev_precision);
        }
        prev_recall = recall;
        prev_precision = precision;
      }
    } else if (have_prev && fp > cur_fp) {
      // Recall-flat segment: precision drops; the next interpolation starts
      // from the degraded precision at this recall level.
      prev_precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    cur_tp = tp;
    cur_fp = fp;
  }
  return area;
}

}  // namespace

double aupr(const TrialScores& t, AuprScheme scheme) {
  if (t.pos.empty()) throw DataError("aupr needs at least one positive score");
  if (t.neg.empty()) throw DataError("aupr needs at least one negative score");
  return scheme == AuprScheme::trapezoid ? aupr_trapezoid(t) : aupr_dg(t);
}

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  constexpr int max_iters = 300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iters; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0 && a > 0.0 && b > 0.0))
    throw DataError("regularized_incomplete_beta: arguments out of range");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(a, b)) *
                   beta_cf(1.0 - x, b, a) / b;
}

double tdist_two_tailed_p(double t, double df) {
  if (df <= 0.0) throw DataError("degrees of freedom must be positive");
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(x, 0.5 * df, 0.5);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b,
                         double alpha) {
  if (a.size() != b.size()) throw DataError("paired t-test needs equal sample sizes");
  if (a.size() < 2) throw DataError("paired t-test needs at least 2 samples");
  const std::size_t n = a.size();

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult res;
  res.mean_diff = mean;
  if (sd == 0.0) {
    res.significant = mean != 0.0;
    res.t = mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity() * (mean > 0 ? 1 : -1);
    res.p = res.significant ? 0.0 : 1.0;
  } else {
    res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    res.p = tdist_two_tailed_p(res.t, static_cast<double>(n - 1));
    res.significant = res.p < alpha;
  }
  res.better = !res.significant ? Better::none : (mean > 0.0 ? Better::a : Better::b);
  return res;
}

RankReport significant_ranks(const MetricSamples& samples, double alpha) {
  const std::size_t n_alg = samples.algorithms.size();
  const std::size_t n_net = samples.networks.size();
  if (n_alg < 2) throw DataError("significant ranking needs at least 2 algorithms");
  if (samples.values.size() != n_net) throw DataError("metric samples shape mismatch");

  RankReport report;
  report.pairwise.assign(n_net, std::vector<std::vector<int>>(n_alg, std::vector<int>(n_alg, 0)));
  report.network_ranks.assign(n_net, std::vector<double>(n_alg, 0.0));
  report.average_rank.assign(n_alg, 0.0);

  for (std::size_t net = 0; net < n_net; ++net) {
    const auto& per_alg = samples.values[net];
    if (per_alg.size() != n_alg) throw DataError("metric samples shape mismatch");
    const std::size_t trials = per_alg[0].size();
    for (const auto& v : per_alg)
      if (v.size() != trials)
        throw DataError("inconsistent trial counts in network " + samples.networks[net]);

    auto& mat = report.pairwise[net];
    std::vector<int> score(n_alg, 0);
    for (std::size_t i = 0; i < n_alg; ++i)
      for (std::size_t j = i + 1; j < n_alg; ++j) {
        const TTestResult r = paired_ttest(per_alg[i], per_alg[j], alpha);
        int s = 0;
        if (r.significant) s = r.better == Better::a ? 1 : -1;
        mat[i][j] = s;
        mat[j][i] = -s;
        score[i] += s;
        score[j] -= s;
      }

    // Rank by descending score with fractional ranks for ties.
    std::vector<std::size_t> order(n_alg);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return score[x] > score[y]; });
    std::size_t i = 0;
    while (i < n_alg) {
      std::size_t j = i;
      while (j < n_alg && score[order[j]] == score[order[i]]) ++j;
      const double rank = 0.5 * static_cast<double>(i + 1 + j);  // average of 1-based positions
      for (std::size_t k = i; k < j; ++k) report.network_ranks[net][order[k]] = rank;
      i = j;
    }
    for (std::size_t a = 0; a < n_alg; ++a)
      report.average_rank[a] += report.network_ranks[net][a] / static_cast<double>(n_net);
  }
  return report;
}

}  // namespace psl
