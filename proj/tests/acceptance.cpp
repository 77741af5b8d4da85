// Acceptance suite: runs every gate criterion and prints one line each.
// Exit code = number of failed criteria (skipped optional ones don't count).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "psl/attraction.hpp"
#include "psl/embedding.hpp"
#include "psl/experiment.hpp"
#include "psl/graph.hpp"
#include "psl/metrics.hpp"
#include "psl/nn.hpp"
#include "psl/objective.hpp"
#include "psl/optimizer.hpp"
#include "psl/popularity.hpp"
#include "psl/rng.hpp"

using namespace psl;

namespace {

std::string g_data_dir = PSL_DATA_DIR;

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
  EdgeList pairs;
  for (std::uint32_t i = 0; i + 1 < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (rng.next_double() < p) pairs.emplace_back(i, j);
  return Graph::from_edges(std::move(labels), pairs);
}

bool gradient_close(std::span<const double> analytic, std::span<const double> fd,
                    double tol) {
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double denom = std::max({std::fabs(analytic[k]), std::fabs(fd[k]), 1.0});
    if (std::fabs(analytic[k] - fd[k]) / denom >= tol) return false;
  }
  return true;
}

// --- criterion 1: analytic gradients vs central finite differences ---------

bool check_objective_gradients(int& checked) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 4 + seed % 5;
    const std::size_t d = 1 + seed % 4;
    Graph g = random_graph(n, 0.5, seed);
    if (g.edge_count() == 0) continue;
    Popularity pi = normalized_popularity(g.degrees());
    AttractionMap eta = local_attraction(g);

    std::vector<ObjectiveSpec> specs;
    for (Norm norm : {Norm::l2, Norm::l1})
      for (ObjectiveModel model :
           {ObjectiveModel::ps, ObjectiveModel::la, ObjectiveModel::combined})
        specs.push_back(build_objective(model, norm, g, pi, eta, std::nullopt,
                                        {1.0, 0.0, 0.05, 1e-4}));
    specs.push_back(build_mfc_objective(g, 0.05));

    SplitMix64 rng(seed * 101);
    for (const auto& spec : specs) {
      Matrix x(n, d);
      for (auto& v : x.data) v = 2.0 * rng.next_double() - 1.0;
      Matrix analytic;
      objective_value_grad(spec, x, analytic);
      auto value_only = [&](std::span<const double> flat) {
        Matrix xm(n, d);
        xm.data.assign(flat.begin(), flat.end());
        Matrix gbuf;
        return objective_value_grad(spec, xm, gbuf);
      };
      const auto fd = finite_diff_gradient(value_only, x.data, 1e-6);
      if (!gradient_close(analytic.data, fd, 1e-5)) return false;
      ++checked;
    }
  }
  return checked >= 7 * 20;
}

// Smallest |pre-activation| among hidden rectifier units; instances at the
// kink make central differences invalid and are regenerated.
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

bool check_mlp_gradients(int& checked) {
  for (std::uint64_t seed = 1; checked < 20 && seed <= 200; ++seed) {
    SplitMix64 rng(seed * 7);
    FeedForwardNet net({4, 6, 4, 2}, seed);
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
    std::vector<std::size_t> idx;
    bool near_kink = false;
    for (std::size_t s = 0; s < 5; ++s) {
      std::vector<double> x(4);
      for (auto& v : x) v = 2.0 * rng.next_double() - 1.0;
      inputs.push_back(x);
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
    const auto fd = finite_diff_gradient(loss_at, net.params(), 1e-6);
    if (!gradient_close(grad, fd, 1e-4)) return false;
    ++checked;
  }
  return checked >= 20;
}

// --- criterion 2 oracles ----------------------------------------------------

TrialScores random_scores(std::uint64_t seed, std::size_t max_size, bool ties) {
  SplitMix64 rng(seed);
  TrialScores t;
  const std::size_t np = 1 + rng.next_below(max_size);
  const std::size_t nn = 1 + rng.next_below(max_size);
  for (std::size_t i = 0; i < np; ++i) t.pos.push_back(rng.next_double());
  for (std::size_t i = 0; i < nn; ++i) t.neg.push_back(rng.next_double());
  if (ties) {
    for (double& v : t.pos) v = std::floor(v * 8.0) / 8.0;
    for (double& v : t.neg) v = std::floor(v * 8.0) / 8.0;
  }
  return t;
}

double auroc_brute(const TrialScores& t) {
  long gt = 0, eq = 0;
  for (double p : t.pos)
    for (double n : t.neg) {
      if (p > n) ++gt;
      else if (p == n) ++eq;
    }
  return (gt + 0.5 * eq) / (double(t.pos.size()) * double(t.neg.size()));
}

double tpr_brute(const TrialScores& t) {
  std::vector<std::pair<double, bool>> items;
  for (double s : t.pos) items.emplace_back(s, true);
  for (double s : t.neg) items.emplace_back(s, false);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::size_t hits = 0;
  for (std::size_t i = 0; i < t.pos.size() && i < items.size(); ++i)
    if (items[i].second) ++hits;
  return double(hits) / double(t.pos.size());
}

// --- criterion 5/6: reproduction experiments --------------------------------

struct Means {
  std::map<std::pair<std::string, std::string>, double> mean;  // (alg, metric)
};

Means experiment_means(const ExperimentConfig& cfg) {
  const ExperimentSummary s = run_experiment(cfg);
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> acc;
  for (const auto& r : s.rows) {
    auto& slot = acc[{r.algorithm, r.metric}];
    slot.first += r.value;
    slot.second += 1;
  }
  Means m;
  for (const auto& [key, v] : acc) m.mean[key] = v.first / v.second;
  return m;
}

ExperimentConfig karate_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.datasets = {g_data_dir + "/karate.txt"};
  cfg.algorithms = {"psl-nn-l2", "psl-dp-l2"};
  cfg.dim = 32;
  cfg.lambda = 0.001;
  cfg.remove_ratio = 0.1;
  cfg.trials = 100;
  cfg.train_neg_ratio = 1e6;  // the whole couple set on a 34-node graph
  cfg.base_seed = 1;
  cfg.metrics = {"tpr", "auroc"};
  cfg.output_dir = out_dir;
  return cfg;
}

// -----------------------------------------------------------------------------

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& detail) {
  std::printf("SKIP criterion %d: %s\n", criterion, detail.c_str());
  std::fflush(stdout);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_data_dir = argv[1];
  const auto t0 = std::chrono::steady_clock::now();

  // 1. gradient suite
  {
    int objective_checks = 0, mlp_checks = 0;
    const bool obj_ok = check_objective_gradients(objective_checks);
    const bool mlp_ok = check_mlp_gradients(mlp_checks);
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    std::ostringstream d;
    d << "analytic vs finite-difference gradients (" << objective_checks
      << " objective + " << mlp_checks << " mlp instances, " << secs << "s)";
    report(1, obj_ok && mlp_ok && secs < 60.0, d.str());
  }

  // 2. metric oracles
  {
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 100 && ok; ++seed) {
      const TrialScores t = random_scores(seed * 3, 200, true);
      ok = ok && auroc(t) == auroc_brute(t);
    }
    for (std::uint64_t seed = 1; seed <= 100 && ok; ++seed) {
      const TrialScores t = random_scores(seed * 5, 200, seed % 2 == 0);
      ok = ok && tpr(t) == tpr_brute(t);
    }
    const bool aupr_ok = std::fabs(aupr({{0.9, 0.3}, {0.5}}) - 11.0 / 12.0) < 1e-12;
    report(2, ok && aupr_ok,
           "auroc/tpr equal brute force on 100 random instances; aupr trapezoid "
           "matches the hand-computed two-segment value");
  }

  // 3. t-test reference values
  {
    const double p1 = tdist_two_tailed_p(4.243, 4.0);
    const double p2 = tdist_two_tailed_p(1.984, 99.0);
    std::ostringstream d;
    d << "two-tailed p(4.243, 4) = " << p1 << " (ref 0.0132), p(1.984, 99) = " << p2
      << " (ref 0.0500)";
    report(3, std::fabs(p1 - 0.013231801588733) < 1e-3 &&
               std::fabs(p2 - 0.050024572918174) < 1e-3,
           d.str());
  }

  // 4. optimizer
  {
    SplitMix64 rng(11);
    std::vector<double> eig(100), x0(100);
    for (std::size_t i = 0; i < 100; ++i) {
      eig[i] = 1.0 + i * 0.3;
      x0[i] = 2.0 * rng.next_double() - 1.0;
    }
    Objective quad = [&eig](std::span<const double> x, std::span<double> g) {
      double f = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        f += 0.5 * eig[i] * x[i] * x[i];
        g[i] = eig[i] * x[i];
      }
      return f;
    };
    MinimizeOptions opts;
    opts.grad_tol = 1e-8;
    MinimizeResult rq = minimize(quad, x0, opts);

    Objective rosen = [](std::span<const double> x, std::span<double> g) {
      const double a = 1.0 - x[0];
      const double b = x[1] - x[0] * x[0];
      g[0] = -2.0 * a - 400.0 * x[0] * b;
      g[1] = 200.0 * b;
      return a * a + 100.0 * b * b;
    };
    MinimizeResult rr = minimize(rosen, {-1.2, 1.0});

    auto strictly_decreasing = [](const std::vector<double>& h) {
      for (std::size_t i = 1; i < h.size(); ++i)
        if (!(h[i] < h[i - 1])) return false;
      return true;
    };
    const bool ok = rq.status == MinimizeStatus::converged && rq.grad_inf_norm < 1e-8 &&
                    std::fabs(rr.x_star[0] - 1.0) < 1e-6 &&
                    std::fabs(rr.x_star[1] - 1.0) < 1e-6 &&
                    strictly_decreasing(rq.f_history) && strictly_decreasing(rr.f_history);
    std::ostringstream d;
    d << "100-d quadratic grad-inf " << rq.grad_inf_norm << "; rosenbrock ("
      << rr.x_star[0] << ", " << rr.x_star[1] << "); monotone descent on all steps";
    report(4, ok, d.str());
  }

  // 5. karate club reproduction
  {
    const auto t5 = std::chrono::steady_clock::now();
    Means m = experiment_means(karate_config("/tmp/psl_acceptance_karate"));
    const double nn_auroc = m.mean[{"psl-nn-l2", "auroc"}];
    const double dp_auroc = m.mean[{"psl-dp-l2", "auroc"}];
    const double nn_tpr = m.mean[{"psl-nn-l2", "tpr"}];
    const double dp_tpr = m.mean[{"psl-dp-l2", "tpr"}];
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t5).count();
    const bool ok = std::fabs(nn_auroc - 0.850) <= 0.06 &&
                    std::fabs(dp_auroc - 0.764) <= 0.06 && nn_tpr > dp_tpr &&
                    secs < 600.0;
    std::ostringstream d;
    d << "karate 100 trials: psl-nn-l2 auroc " << nn_auroc
      << " (target 0.850 +- 0.06), psl-dp-l2 auroc " << dp_auroc
      << " (target 0.764 +- 0.06), tpr " << nn_tpr << " > " << dp_tpr << " ("
      << secs << "s)";
    report(5, ok, d.str());
  }

  // 6. C. Elegans Metabolic reproduction (optional dataset)
  {
    const std::string path = g_data_dir + "/celegans_metabolic.txt";
    if (!std::filesystem::exists(path)) {
      report_skip(6, "dataset celegans_metabolic.txt not present");
    } else {
      ExperimentConfig cfg = karate_config("/tmp/psl_acceptance_celegans");
      cfg.datasets = {path};
      cfg.algorithms = {"psl-nn-l2"};
      Means m = experiment_means(cfg);
      const double nn_auroc = m.mean[{"psl-nn-l2", "auroc"}];
      std::ostringstream d;
      d << "c. elegans metabolic psl-nn-l2 auroc " << nn_auroc << " (target 0.875 +- 0.05)";
      report(6, std::fabs(nn_auroc - 0.875) <= 0.05, d.str());
    }
  }

  // 7. determinism + local-attraction equivalence (full-table substitute)
  {
    ExperimentConfig cfg;
    cfg.datasets = {g_data_dir + "/ring40.txt", g_data_dir + "/tree31.txt"};
    cfg.algorithms = {"psl-dp-l2", "mfc-dp"};
    cfg.dim = 4;
    cfg.lambda = 0.01;
    cfg.remove_ratio = 0.2;
    cfg.trials = 3;
    cfg.max_iters = 150;
    cfg.base_seed = 17;
    cfg.output_dir = "/tmp/psl_acceptance_det1";
    std::filesystem::remove_all(cfg.output_dir);
    ExperimentSummary s1 = run_experiment(cfg);
    cfg.output_dir = "/tmp/psl_acceptance_det2";
    std::filesystem::remove_all(cfg.output_dir);
    ExperimentSummary s2 = run_experiment(cfg);
    const bool identical = slurp(s1.results_path) == slurp(s2.results_path) &&
                           slurp(s1.ranks_path) == slurp(s2.ranks_path) &&
                           !slurp(s1.results_path).empty();

    bool eta_ok = true;
    for (std::uint64_t seed = 1; seed <= 6 && eta_ok; ++seed) {
      const std::size_t n = 10 + 8 * (seed - 1);  // up to 50
      Graph g = random_graph(n, 0.12, seed * 29);
      AttractionMap fast = local_attraction(g);
      const double denom = std::log(double(g.max_degree()) + 1.0);
      std::size_t brute_entries = 0;
      for (std::uint32_t i = 0; i + 1 < g.node_count() && eta_ok; ++i)
        for (std::uint32_t j = i + 1; j < g.node_count() && eta_ok; ++j) {
          const auto& a = g.neighbors(i);
          const auto& b = g.neighbors(j);
          double prod = 1.0;
          bool any = false;
          std::size_t x = 0, y = 0;
          while (x < a.size() && y < b.size()) {
            if (a[x] < b[y]) ++x;
            else if (a[x] > b[y]) ++y;
            else {
              prod *= std::log(double(g.degree(a[x])) + 1.0) / denom;
              any = true;
              ++x;
              ++y;
            }
          }
          if (any) {
            ++brute_entries;
            if (fast.at(i, j) != 1.0 - prod) eta_ok = false;
          } else if (fast.contains(i, j)) {
            eta_ok = false;
          }
        }
      if (fast.size() != brute_entries) eta_ok = false;
    }
    report(7, identical && eta_ok,
           "byte-identical experiment reruns; local attraction equals brute force "
           "exactly on graphs up to n=50 (with property suites 1-4 standing in for "
           "the full-table reproduction)");
  }

  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d criteria failed (%.1fs total)\n", g_failures, total);
  return g_failures == 0 ? 0 : 1;
}
