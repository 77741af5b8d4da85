#include "psl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "psl/error.hpp"
#include "psl/rng.hpp"

namespace psl {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

AlgorithmSpec parse_algorithm(const std::string& name) {
  AlgorithmSpec spec;
  spec.name = name;
  const std::vector<std::string> parts = [&] {
    std::vector<std::string> p;
    std::string item;
    std::istringstream in(lower(name));
    while (std::getline(in, item, '-')) p.push_back(item);
    return p;
  }();
  if (parts.size() < 2) throw DataError("bad algorithm name: " + name);

  if (parts[0] == "psl") spec.mode = EmbedMode::concat;
  else if (parts[0] == "ps") spec.mode = EmbedMode::ps;
  else if (parts[0] == "la") spec.mode = EmbedMode::la;
  else if (parts[0] == "mfc") spec.mode = EmbedMode::mfc;
  else if (parts[0] == "co" || parts[0] == "combined") spec.mode = EmbedMode::combined;
  else throw DataError("bad algorithm name (embedding part): " + name);

  if (parts[1] == "nn") spec.recon = ReconKind::mlp;
  else if (parts[1] == "dp") spec.recon = ReconKind::dot;
  else if (parts[1] == "lr") spec.recon = ReconKind::logreg;
  else throw DataError("bad algorithm name (reconstruction part): " + name);

  if (parts.size() >= 3) {
    if (parts[2] == "l1") spec.norm = Norm::l1;
    else if (parts[2] == "l2") spec.norm = Norm::l2;
    else if (parts[2] == "co") {  // combined-objective variant
      spec.mode = EmbedMode::combined;
      spec.norm = Norm::l2;
    } else {
      throw DataError("bad algorithm name (cost part): " + name);
    }
  }
  return spec;
}

void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value) {
  if (key == "datasets") cfg.datasets = split_list(value);
  else if (key == "algorithms") cfg.algorithms = split_list(value);
  else if (key == "dim") cfg.dim = std::stoi(value);
  else if (key == "psi1") cfg.psi1 = std::stod(value);
  else if (key == "psi0") cfg.psi0 = std::stod(value);
  else if (key == "lambda") cfg.lambda = std::stod(value);
  else if (key == "smoothing_eps") cfg.smoothing_eps = std::stod(value);
  else if (key == "remove_ratio") cfg.remove_ratio = std::stod(value);
  else if (key == "trials") cfg.trials = std::stoi(value);
  else if (key == "epochs") cfg.epochs = std::stoi(value);
  else if (key == "batch") cfg.batch = std::stoi(value);
  else if (key == "lr") cfg.lr = std::stod(value);
  else if (key == "train_neg_ratio") cfg.train_neg_ratio = std::stod(value);
  else if (key == "pair_budget") cfg.pair_budget = std::stoull(value);
  else if (key == "neg_fraction") cfg.neg_fraction = std::stod(value);
  else if (key == "emb_neg") {
    const std::string v = lower(value);
    if (v == "auto") cfg.emb_neg.mode = NegSampling::Mode::automatic;
    else if (v == "all") cfg.emb_neg.mode = NegSampling::Mode::all;
    else if (v == "sampled") cfg.emb_neg.mode = NegSampling::Mode::sampled;
    else throw ParseError("unknown emb_neg mode: " + value);
  } else if (key == "emb_neg_per_edge") cfg.emb_neg.sample_per_edge = std::stod(value);
  else if (key == "max_iters") cfg.max_iters = std::stoi(value);
  else if (key == "grad_tol") cfg.grad_tol = std::stod(value);
  else if (key == "base_seed") cfg.base_seed = std::stoull(value);
  else if (key == "metrics") cfg.metrics = split_list(value);
  else if (key == "aupr_scheme") {
    const std::string v = lower(value);
    if (v == "trapezoid") cfg.aupr_scheme = AuprScheme::trapezoid;
    else if (v == "dg_interpolation" || v == "dg") cfg.aupr_scheme = AuprScheme::dg_interpolation;
    else throw ParseError("unknown aupr_scheme: " + value);
  } else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "large") cfg.large = (lower(value) == "true" || value == "1");
  else throw ParseError("unknown config key: " + key);
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": expected key=value";
      throw ParseError(msg.str());
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    try {
      apply_config_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument&) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": bad value";
      throw ParseError(msg.str());
    } catch (const std::out_of_range&) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": value out of range";
      throw ParseError(msg.str());
    }
  }
  return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  try {
    return parse_experiment_config(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

namespace {

std::string network_name(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

struct NetworkData {
  std::string name;
  Graph graph;
  std::optional<EdgeList> enumerated_negs;  // non-edges of the full graph
};

struct TaskResult {
  std::vector<ResultRow> rows;
  std::vector<TrialFailure> failures;
};

double metric_value(const std::string& metric, const TrialScores& scores,
                    AuprScheme scheme) {
  if (metric == "tpr") return tpr(scores);
  if (metric == "auroc") return auroc(scores);
  if (metric == "aupr") return aupr(scores, scheme);
  throw DataError("unknown metric: " + metric);
}

std::size_t round_count(double x) {
  return static_cast<std::size_t>(std::llround(x));
}

// All rows for one (network, trial).
TaskResult run_trial(const ExperimentConfig& cfg, const NetworkData& net,
                     const std::vector<AlgorithmSpec>& algs, int trial) {
  TaskResult out;
  const std::uint64_t trial_seed = cfg.base_seed + static_cast<std::uint64_t>(trial);

  SplitResult split;
  EdgeList eval_negs;
  try {
    split = split_edges(net.graph, cfg.remove_ratio, trial_seed);
    if (net.enumerated_negs) {
      eval_negs = *net.enumerated_negs;
    } else {
      const std::uint64_t total_negs = net.graph.pair_count() - net.graph.edge_count();
      const std::size_t count =
          round_count(cfg.neg_fraction * static_cast<double>(total_negs));
      eval_negs = sample_negative_edges(net.graph, count, derive_seed(trial_seed, 1));
    }
  } catch (const Error& e) {
    for (const auto& alg : algs)
      out.failures.push_back({net.name, alg.name, trial, e.what()});
    return out;
  }

  MinimizeOptions opt;
  opt.max_iters = cfg.large ? std::min(cfg.max_iters, 100) : cfg.max_iters;
  opt.grad_tol = cfg.grad_tol;

  // Algorithms sharing an embedding variant reuse one fit per trial.
  std::map<std::pair<EmbedMode, Norm>, Embedding> cache;
  auto embedding_for = [&](const AlgorithmSpec& alg) -> const Embedding& {
    const auto key = std::make_pair(alg.mode, alg.norm);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    EmbedConfig ec;
    ec.mode = alg.mode;
    ec.dim = cfg.dim;
    ec.norm = alg.norm;
    ec.psi1 = cfg.psi1;
    ec.psi0 = cfg.psi0;
    ec.lambda = cfg.lambda;
    ec.smoothing_eps = cfg.smoothing_eps;
    ec.neg = cfg.emb_neg;
    ec.neg.pair_budget = cfg.pair_budget;
    ec.opt = opt;
    ec.seed = derive_seed(trial_seed, 2);
    return cache.emplace(key, embed(split.train, ec)).first->second;
  };

  for (const auto& alg : algs) {
    try {
      const Embedding& emb = embedding_for(alg);

      ScoredEdges scored_pos, scored_neg;
      if (alg.recon == ReconKind::dot) {
        scored_pos = score_edges_dot(emb, split.removed);
        scored_neg = score_edges_dot(emb, eval_negs);
      } else {
        const EdgeList train_pos = split.train.edges();
        const std::uint64_t train_non_edges =
            split.train.pair_count() - split.train.edge_count();
        const std::size_t n_neg = std::min<std::size_t>(
            train_non_edges,
            cfg.large ? round_count(cfg.neg_fraction * static_cast<double>(train_non_edges))
                      : round_count(cfg.train_neg_ratio * static_cast<double>(train_pos.size())));
        const EdgeList train_negs =
            sample_negative_edges(split.train, n_neg, derive_seed(trial_seed, 3));
        const ClassifierKind kind =
            alg.recon == ReconKind::mlp ? ClassifierKind::mlp : ClassifierKind::logreg;
        TrainOptions topts{cfg.epochs, cfg.batch, cfg.lr, derive_seed(trial_seed, 4)};
        const Model model = train_classifier(emb, train_pos, train_negs, kind, topts);
        scored_pos = score_edges(model, emb, split.removed);
        scored_neg = score_edges(model, emb, eval_negs);
      }

      TrialScores scores;
      scores.pos.reserve(scored_pos.size());
      for (const auto& s : scored_pos) scores.pos.push_back(s.score);
      scores.neg.reserve(scored_neg.size());
      for (const auto& s : scored_neg) scores.neg.push_back(s.score);

      // All metrics of one (algorithm, trial) land together or not at all, so
      // trial counts stay consistent across algorithms for the ranking step.
      std::vector<ResultRow> rows;
      for (const auto& metric : cfg.metrics)
        rows.push_back(
            {net.name, alg.name, trial, metric, metric_value(metric, scores, cfg.aupr_scheme)});
      out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    } catch (const Error& e) {
      out.failures.push_back({net.name, alg.name, trial, e.what()});
    }
  }
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("PSL_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

}  // namespace

void write_results_csv(std::ostream& out, const ExperimentConfig& cfg,
                       const std::vector<ResultRow>& rows,
                       const std::vector<std::pair<std::string, bool>>& eval_paths) {
  out << "# psl-results v1 base_seed=" << cfg.base_seed << " remove_ratio="
      << format_double(cfg.remove_ratio) << " trials=" << cfg.trials << "\n";
  for (const auto& [name, enumerated] : eval_paths)
    out << "# network " << name << " eval_negatives="
        << (enumerated ? "enumerated" : "sampled") << "\n";
  out << "network,algorithm,trial,metric,value\n";
  for (const auto& r : rows)
    out << r.network << "," << r.algorithm << "," << r.trial << "," << r.metric << ","
        << format_double(r.value) << "\n";
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "network,algorithm,trial,metric,value")
        throw ParseError("results csv: unexpected header");
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    ResultRow r;
    std::string trial_s, value_s;
    if (!std::getline(ls, r.network, ',') || !std::getline(ls, r.algorithm, ',') ||
        !std::getline(ls, trial_s, ',') || !std::getline(ls, r.metric, ',') ||
        !std::getline(ls, value_s)) {
      std::ostringstream msg;
      msg << "results csv line " << line_no << ": expected 5 fields";
      throw ParseError(msg.str());
    }
    try {
      r.trial = std::stoi(trial_s);
      r.value = std::stod(value_s);
    } catch (const std::exception&) {
      std::ostringstream msg;
      msg << "results csv line " << line_no << ": bad number";
      throw ParseError(msg.str());
    }
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("results csv: missing header");
  return rows;
}

MetricSamples collect_metric_samples(const std::vector<ResultRow>& rows,
                                     const std::string& metric) {
  MetricSamples samples;
  samples.metric = metric;
  std::map<std::string, std::size_t> alg_index, net_index;
  for (const auto& r : rows) {
    if (r.metric != metric) continue;
    if (!net_index.count(r.network)) {
      net_index.emplace(r.network, samples.networks.size());
      samples.networks.push_back(r.network);
    }
    if (!alg_index.count(r.algorithm)) {
      alg_index.emplace(r.algorithm, samples.algorithms.size());
      samples.algorithms.push_back(r.algorithm);
    }
  }
  samples.values.assign(samples.networks.size(),
                        std::vector<std::vector<double>>(samples.algorithms.size()));
  for (const auto& r : rows) {
    if (r.metric != metric) continue;
    samples.values[net_index[r.network]][alg_index[r.algorithm]].push_back(r.value);
  }
  return samples;
}

void write_ranks_csv(std::ostream& out, const std::vector<ResultRow>& rows,
                     const std::vector<std::string>& metrics, double alpha) {
  out << "algorithm,metric,avg_significant_rank\n";
  for (const auto& metric : metrics) {
    const MetricSamples samples = collect_metric_samples(rows, metric);
    if (samples.algorithms.size() < 2) continue;
    try {
      const RankReport report = significant_ranks(samples, alpha);
      for (std::size_t a = 0; a < samples.algorithms.size(); ++a)
        out << samples.algorithms[a] << "," << metric << ","
            << format_double(report.average_rank[a]) << "\n";
    } catch (const DataError& e) {
      // trial failures can leave uneven counts; keep the rest of the report
      out << "# " << metric << " skipped: " << e.what() << "\n";
    }
  }
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.datasets.empty()) throw DataError("experiment needs at least one dataset");
  if (cfg.trials < 1) throw DataError("experiment needs trials >= 1");
  if (!(cfg.remove_ratio > 0.0 && cfg.remove_ratio < 1.0))
    throw DataError("remove_ratio must be in (0,1)");
  for (const auto& metric : cfg.metrics)
    if (metric != "tpr" && metric != "aupr" && metric != "auroc")
      throw DataError("unknown metric: " + metric);

  std::vector<AlgorithmSpec> algs;
  for (const auto& name : cfg.algorithms) algs.push_back(parse_algorithm(name));
  if (cfg.large) {
    // Large-network profile: logistic regression replaces the neural net.
    for (auto& alg : algs)
      if (alg.recon == ReconKind::mlp) alg.recon = ReconKind::logreg;
  }

  std::vector<NetworkData> nets;
  for (const auto& path : cfg.datasets) {
    NetworkData nd;
    nd.name = network_name(path);
    nd.graph = load_edge_list_file(path);
    if (nd.graph.pair_count() <= cfg.pair_budget && !cfg.large)
      nd.enumerated_negs = enumerate_negative_edges(nd.graph, cfg.pair_budget);
    nets.push_back(std::move(nd));
  }

  // One task per (network, trial); results keyed by task index so output
  // order does not depend on scheduling.
  struct Task {
    std::size_t net;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t n = 0; n < nets.size(); ++n)
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({n, t});

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      results[i] = run_trial(cfg, nets[tasks[i].net], algs, tasks[i].trial);
    }
  };
  const int workers = std::min<int>(worker_count(), static_cast<int>(tasks.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  ExperimentSummary summary;
  for (const auto& r : results) {
    summary.rows.insert(summary.rows.end(), r.rows.begin(), r.rows.end());
    summary.failures.insert(summary.failures.end(), r.failures.begin(), r.failures.end());
  }
  std::sort(summary.rows.begin(), summary.rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    if (a.network != b.network) return a.network < b.network;
    if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
    if (a.trial != b.trial) return a.trial < b.trial;
    return a.metric < b.metric;
  });

  std::filesystem::create_directories(cfg.output_dir);
  std::vector<std::pair<std::string, bool>> eval_paths;
  for (const auto& nd : nets) eval_paths.emplace_back(nd.name, nd.enumerated_negs.has_value());

  summary.results_path = (std::filesystem::path(cfg.output_dir) / "results.csv").string();
  {
    std::ofstream out(summary.results_path);
    if (!out) throw DataError("cannot write " + summary.results_path);
    write_results_csv(out, cfg, summary.rows, eval_paths);
  }

  if (cfg.algorithms.size() >= 2) {
    summary.ranks_path = (std::filesystem::path(cfg.output_dir) / "ranks.csv").string();
    std::ofstream out(summary.ranks_path);
    if (!out) throw DataError("cannot write " + summary.ranks_path);
    write_ranks_csv(out, summary.rows, cfg.metrics, 0.05);
  }
  return summary;
}

}  // namespace psl
