#include "psl/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>

#include "psl/embedding.hpp"
#include "psl/error.hpp"
#include "psl/experiment.hpp"
#include "psl/graph.hpp"
#include "psl/metrics.hpp"
#include "psl/reconstruction.hpp"

namespace psl {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

Norm norm_from_string(const std::string& s) {
  if (s == "l2") return Norm::l2;
  if (s == "l1") return Norm::l1;
  throw DataError("unknown norm: " + s);
}

struct EmbedArgs {
  std::string input;
  std::string output;
  std::string mode = "concat";
  std::string norm = "l2";
  int dim = 32;
  double psi1 = 1.0, psi0 = 0.0, lambda = 0.0;
  std::uint64_t seed = 0;
  int max_iters = 1000;
  double grad_tol = 1e-6;
  std::string neg = "auto";
  double neg_per_edge = 10.0;
};

int cmd_embed(const EmbedArgs& a) {
  EmbedConfig cfg;
  cfg.mode = embed_mode_from_string(a.mode);
  cfg.dim = a.dim;
  cfg.norm = norm_from_string(a.norm);
  cfg.psi1 = a.psi1;
  cfg.psi0 = a.psi0;
  cfg.lambda = a.lambda;
  cfg.seed = a.seed;
  cfg.opt.max_iters = a.max_iters;
  cfg.opt.grad_tol = a.grad_tol;
  if (a.neg == "auto") cfg.neg.mode = NegSampling::Mode::automatic;
  else if (a.neg == "all") cfg.neg.mode = NegSampling::Mode::all;
  else if (a.neg == "sampled") cfg.neg.mode = NegSampling::Mode::sampled;
  else throw DataError("unknown negative sampling mode: " + a.neg);
  cfg.neg.sample_per_edge = a.neg_per_edge;

  const Graph g = load_edge_list_file(a.input);
  EmbedStats stats;
  const Embedding emb = cfg.mode == EmbedMode::mfc
                            ? baseline_mfc_embed(g, cfg.dim, cfg.lambda, cfg.opt, cfg.seed, &stats)
                            : embed(g, cfg, &stats);
  write_embedding_file(a.output, emb);

  for (const auto& ph : stats.phases)
    std::cout << ph.phase << ": objective " << format_double(ph.objective_value)
              << ", iterations " << ph.iterations << ", terms " << ph.term_count << "\n";
  std::cout << "wrote " << a.output << " (" << emb.node_count() << " nodes, dim "
            << emb.dim() << ")\n";
  return kExitOk;
}

struct ScoreArgs {
  std::string embedding;
  std::string graph;
  std::string model;
  std::string candidates;
  std::string output;
  std::uint64_t max_pairs = kDefaultPairBudget;
};

int cmd_score(const ScoreArgs& a) {
  const Embedding emb = read_embedding_file(a.embedding);
  const Graph g = load_edge_list_file(a.graph);
  if (g.node_count() != emb.node_count())
    throw DataError("embedding and graph disagree on node count");
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (g.labels()[i] != emb.labels[i])
      throw DataError("embedding and graph disagree on node labels");

  EdgeList candidates;
  if (!a.candidates.empty()) {
    // Candidate pairs in edge-list format; labels must exist in the graph.
    std::ifstream in(a.candidates);
    if (!in) throw DataError("cannot open candidates file: " + a.candidates);
    std::unordered_map<std::string, std::uint32_t> index;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) index.emplace(g.labels()[i], i);
    std::string line, u, v;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::istringstream ls(line);
      if (!(ls >> u >> v)) {
        std::ostringstream msg;
        msg << a.candidates << ": line " << line_no << ": expected two labels";
        throw ParseError(msg.str());
      }
      auto iu = index.find(u), iv = index.find(v);
      if (iu == index.end() || iv == index.end()) {
        std::ostringstream msg;
        msg << a.candidates << ": line " << line_no << ": unknown node label";
        throw DataError(msg.str());
      }
      if (iu->second == iv->second) continue;
      const Edge e = make_edge(iu->second, iv->second);
      if (g.has_edge(e.first, e.second)) {
        std::cerr << "warning: skipping existing edge " << u << " " << v << "\n";
        continue;
      }
      candidates.push_back(e);
    }
  } else {
    candidates = enumerate_negative_edges(g, a.max_pairs);
  }

  ScoredEdges scored;
  if (!a.model.empty()) {
    const Model model = read_model_file(a.model);
    if (model_emb_dim(model) != emb.dim())
      throw DataError("model/embedding dimension mismatch");
    scored = score_edges(model, emb, candidates);
  } else {
    scored = score_edges_dot(emb, candidates);
  }

  if (a.output.empty()) {
    write_scored_tsv(std::cout, std::move(scored), g.labels());
  } else {
    std::ofstream out(a.output);
    if (!out) throw DataError("cannot write " + a.output);
    write_scored_tsv(out, std::move(scored), g.labels());
  }
  return kExitOk;
}

struct ExperimentArgs {
  std::string config;
  std::vector<std::string> overrides;
  bool large = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  ExperimentConfig cfg = parse_experiment_config_file(a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DataError("override must be key=value: " + kv);
    apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.large) cfg.large = true;
  const ExperimentSummary summary = run_experiment(cfg);
  std::cout << "wrote " << summary.results_path << " (" << summary.rows.size() << " rows)\n";
  if (!summary.ranks_path.empty()) std::cout << "wrote " << summary.ranks_path << "\n";
  if (!summary.failures.empty()) {
    std::cout << summary.failures.size() << " trial failures:\n";
    for (const auto& f : summary.failures)
      std::cout << "  " << f.network << " " << f.algorithm << " trial " << f.trial << ": "
                << f.what << "\n";
  }
  return kExitOk;
}

struct RankArgs {
  std::string results;
  std::string output;
  double alpha = 0.05;
};

int cmd_rank(const RankArgs& a) {
  std::ifstream in(a.results);
  if (!in) throw DataError("cannot open results file: " + a.results);
  const std::vector<ResultRow> rows = read_results_csv(in);

  std::vector<std::string> metrics;
  for (const auto& r : rows)
    if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end())
      metrics.push_back(r.metric);

  if (a.output.empty()) {
    write_ranks_csv(std::cout, rows, metrics, a.alpha);
  } else {
    std::ofstream out(a.output);
    if (!out) throw DataError("cannot write " + a.output);
    write_ranks_csv(out, rows, metrics, a.alpha);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"popularity-similarity + local-attraction graph embedding and "
               "link-prediction evaluation"};
  app.require_subcommand(1);

  EmbedArgs ea;
  auto* embed_cmd = app.add_subcommand("embed", "fit node coordinates for a graph");
  embed_cmd->add_option("--input", ea.input, "edge list file")->required();
  embed_cmd->add_option("--output", ea.output, "embedding file to write")->required();
  embed_cmd->add_option("--mode", ea.mode, "ps|la|concat|combined|mfc")
      ->check(CLI::IsMember({"ps", "la", "concat", "combined", "mfc"}));
  embed_cmd->add_option("--norm", ea.norm, "l2|l1")->check(CLI::IsMember({"l2", "l1"}));
  embed_cmd->add_option("--dim", ea.dim, "embedding dimension")
      ->check(CLI::PositiveNumber);
  embed_cmd->add_option("--psi1", ea.psi1, "target score for positive pairs");
  embed_cmd->add_option("--psi0", ea.psi0, "target score for negative pairs");
  embed_cmd->add_option("--lambda", ea.lambda, "regularization coefficient");
  embed_cmd->add_option("--seed", ea.seed, "random seed");
  embed_cmd->add_option("--max-iters", ea.max_iters, "optimizer iteration cap");
  embed_cmd->add_option("--grad-tol", ea.grad_tol, "optimizer gradient tolerance");
  embed_cmd->add_option("--neg", ea.neg, "negative pairs: auto|all|sampled")
      ->check(CLI::IsMember({"auto", "all", "sampled"}));
  embed_cmd->add_option("--neg-per-edge", ea.neg_per_edge,
                        "sampled negative pairs per positive edge");

  ScoreArgs sa;
  auto* score_cmd = app.add_subcommand("score", "score candidate edges");
  score_cmd->add_option("--embedding", sa.embedding, "embedding file")->required();
  score_cmd->add_option("--graph", sa.graph, "edge list the embedding was fit on")->required();
  score_cmd->add_option("--model", sa.model, "trained classifier (dot product if absent)");
  score_cmd->add_option("--candidates", sa.candidates,
                        "candidate pairs file (all non-edges if absent)");
  score_cmd->add_option("--output", sa.output, "TSV to write (stdout if absent)");
  score_cmd->add_option("--max-pairs", sa.max_pairs, "pair budget for enumeration");

  ExperimentArgs xa;
  auto* exp_cmd = app.add_subcommand("experiment", "run a removal/evaluation experiment");
  exp_cmd->add_option("--config", xa.config, "key=value config file")->required();
  exp_cmd->add_option("--set", xa.overrides, "config override key=value (repeatable)");
  exp_cmd->add_flag("--large", xa.large,
                    "large-network profile: logistic regression, 100-iteration "
                    "optimizer cap, 0.1% negative sampling");

  RankArgs ra;
  auto* rank_cmd = app.add_subcommand("rank", "average significant ranks from a results CSV");
  rank_cmd->add_option("--results", ra.results, "results CSV")->required();
  rank_cmd->add_option("--alpha", ra.alpha, "significance level");
  rank_cmd->add_option("--output", ra.output, "CSV to write (stdout if absent)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (embed_cmd->parsed()) {
      if (ea.mode == "concat" && ea.dim % 2 != 0) {
        std::cerr << "concat mode needs an even --dim\n";
        return kExitUsage;
      }
      return cmd_embed(ea);
    }
    if (score_cmd->parsed()) return cmd_score(sa);
    if (exp_cmd->parsed()) return cmd_experiment(xa);
    if (rank_cmd->parsed()) return cmd_rank(ra);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace psl
