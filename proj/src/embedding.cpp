#include "psl/embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "psl/attraction.hpp"
#include "psl/error.hpp"
#include "psl/popularity.hpp"
#include "psl/rng.hpp"

namespace psl {

const char* to_string(EmbedMode m) {
  switch (m) {
    case EmbedMode::ps: return "ps";
    case EmbedMode::la: return "la";
    case EmbedMode::concat: return "concat";
    case EmbedMode::combined: return "combined";
    case EmbedMode::mfc: return "mfc";
  }
  return "?";
}

EmbedMode embed_mode_from_string(const std::string& s) {
  if (s == "ps") return EmbedMode::ps;
  if (s == "la") return EmbedMode::la;
  if (s == "concat") return EmbedMode::concat;
  if (s == "combined") return EmbedMode::combined;
  if (s == "mfc") return EmbedMode::mfc;
  throw ParseError("unknown embedding mode: " + s);
}

namespace {

Matrix random_init(std::size_t n, std::size_t d, std::uint64_t seed) {
  Matrix X(n, d);
  SplitMix64 rng(seed);
  const double half_width = 0.5 / std::sqrt(static_cast<double>(d));
  for (double& v : X.data) v = (2.0 * rng.next_double() - 1.0) * half_width;
  return X;
}

// Picks the negative-pair sample for one objective, or nullopt to enumerate.
std::optional<EdgeList> pick_negatives(ObjectiveModel model, const Graph& g,
                                       const AttractionMap& eta, const NegSampling& neg,
                                       std::uint64_t seed) {
  bool enumerate;
  switch (neg.mode) {
    case NegSampling::Mode::all: enumerate = true; break;
    case NegSampling::Mode::sampled: enumerate = false; break;
    case NegSampling::Mode::automatic:
    default: enumerate = g.pair_count() <= neg.pair_budget; break;
  }
  if (enumerate) return std::nullopt;

  auto count = static_cast<std::uint64_t>(
      std::llround(neg.sample_per_edge * static_cast<double>(g.edge_count())));
  if (model == ObjectiveModel::la) {
    EdgeList keep;  // pairs with positive attraction are never sampled over
    for (const auto& e : eta.sorted_entries())
      if (e.eta > 0.0) keep.emplace_back(e.i, e.j);
    const std::uint64_t available = g.pair_count() - keep.size();
    if (count >= available) return std::nullopt;  // sample would be the whole set
    return sample_pairs_excluding(g.node_count(), static_cast<std::size_t>(count), seed, keep);
  }
  const std::uint64_t available = g.pair_count() - g.edge_count();
  if (count >= available) return std::nullopt;
  return sample_negative_edges(g, static_cast<std::size_t>(count), seed);
}

struct FitResult {
  Matrix X;
  PhaseStats stats;
};

FitResult fit(const ObjectiveSpec& spec, std::size_t n, std::size_t d,
              std::uint64_t init_seed, const MinimizeOptions& opt, const char* phase) {
  Matrix X0 = random_init(n, d, init_seed);
  Matrix X_buf(n, d), grad_buf;
  Objective obj = [&spec, &X_buf, &grad_buf](std::span<const double> x,
                                             std::span<double> grad) {
    std::copy(x.begin(), x.end(), X_buf.data.begin());
    const double v = objective_value_grad(spec, X_buf, grad_buf);
    std::copy(grad_buf.data.begin(), grad_buf.data.end(), grad.begin());
    return v;
  };

  MinimizeResult r = minimize(obj, std::move(X0.data), opt);
  for (double v : r.x_star)
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << phase << " optimization produced non-finite coordinates after "
          << r.iterations << " iterations (f = " << r.f_star << ")";
      throw NumericalError(msg.str());
    }

  FitResult out;
  out.X.rows = n;
  out.X.cols = d;
  out.X.data = std::move(r.x_star);
  out.stats = {phase, r.f_star, r.iterations, r.status, spec.term_count(),
               std::move(r.f_history)};
  return out;
}

Embedding embed_single(const Graph& g, const EmbedConfig& cfg, ObjectiveModel model,
                       EmbedStats* stats) {
  const std::size_t n = g.node_count();
  const bool needs_pi = model != ObjectiveModel::la;
  const bool needs_eta = model != ObjectiveModel::ps;

  Popularity pi;
  if (needs_pi) pi = normalized_popularity(g.degrees());
  AttractionMap eta;
  if (needs_eta) eta = local_attraction(g);

  const std::optional<EdgeList> neg =
      pick_negatives(model, g, eta, cfg.neg, derive_seed(cfg.seed, 11));
  ObjectiveParams params{cfg.psi1, cfg.psi0, cfg.lambda, cfg.smoothing_eps};
  const ObjectiveSpec spec = build_objective(model, cfg.norm, g, pi, eta, neg, params);

  const char* phase = model == ObjectiveModel::ps     ? "ps"
                      : model == ObjectiveModel::la   ? "la"
                                                      : "combined";
  FitResult fitted =
      fit(spec, n, static_cast<std::size_t>(cfg.dim), derive_seed(cfg.seed, 0), cfg.opt, phase);
  if (stats) stats->phases.push_back(fitted.stats);

  Embedding emb;
  emb.labels = g.labels();
  emb.kind = cfg.mode;
  if (needs_pi) {
    for (std::size_t i = 0; i < n; ++i) {
      double* row = fitted.X.row(i);
      for (std::size_t k = 0; k < fitted.X.cols; ++k) row[k] *= pi.pi[i];
    }
    emb.pi = pi.pi;
  }
  emb.coords = std::move(fitted.X);
  return emb;
}

}  // namespace

Embedding embed(const Graph& g_train, const EmbedConfig& cfg, EmbedStats* stats) {
  if (cfg.dim < 1) throw DataError("embedding dimension must be >= 1");
  switch (cfg.mode) {
    case EmbedMode::ps:
      return embed_single(g_train, cfg, ObjectiveModel::ps, stats);
    case EmbedMode::la:
      return embed_single(g_train, cfg, ObjectiveModel::la, stats);
    case EmbedMode::combined:
      return embed_single(g_train, cfg, ObjectiveModel::combined, stats);
    case EmbedMode::mfc:
      return baseline_mfc_embed(g_train, cfg.dim, cfg.lambda, cfg.opt, cfg.seed, stats);
    case EmbedMode::concat:
      break;
  }

  if (cfg.dim % 2 != 0) throw DataError("concat mode needs an even dimension");
  EmbedConfig half = cfg;
  half.dim = cfg.dim / 2;

  half.mode = EmbedMode::ps;
  half.seed = derive_seed(cfg.seed, 1);
  Embedding ps_half = embed_single(g_train, half, ObjectiveModel::ps, stats);

  half.mode = EmbedMode::la;
  half.seed = derive_seed(cfg.seed, 2);
  Embedding la_half = embed_single(g_train, half, ObjectiveModel::la, stats);

  Embedding emb;
  emb.kind = EmbedMode::concat;
  emb.labels = g_train.labels();
  emb.coords = Matrix(g_train.node_count(), static_cast<std::size_t>(cfg.dim));
  for (std::size_t i = 0; i < emb.coords.rows; ++i) {
    double* row = emb.coords.row(i);
    const double* a = ps_half.coords.row(i);
    const double* b = la_half.coords.row(i);
    for (std::size_t k = 0; k < ps_half.coords.cols; ++k) row[k] = a[k];
    for (std::size_t k = 0; k < la_half.coords.cols; ++k)
      row[ps_half.coords.cols + k] = b[k];
  }
  return emb;
}

Embedding baseline_mfc_embed(const Graph& g_train, int dim, double lambda,
                             const MinimizeOptions& opt, std::uint64_t seed,
                             EmbedStats* stats) {
  if (dim < 1) throw DataError("embedding dimension must be >= 1");
  const ObjectiveSpec spec = build_mfc_objective(g_train, lambda);
  FitResult fitted = fit(spec, g_train.node_count(), static_cast<std::size_t>(dim),
                         derive_seed(seed, 0), opt, "mfc");
  if (stats) stats->phases.push_back(fitted.stats);
  Embedding emb;
  emb.kind = EmbedMode::mfc;
  emb.labels = g_train.labels();
  emb.coords = std::move(fitted.X);
  return emb;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_embedding(std::ostream& out, const Embedding& emb) {
  out << "# psl-embed v1 dim=" << emb.dim() << " kind=" << to_string(emb.kind) << "\n";
  for (std::size_t i = 0; i < emb.node_count(); ++i) {
    out << emb.labels[i];
    const double* row = emb.coords.row(i);
    for (std::size_t k = 0; k < emb.dim(); ++k) out << " " << format_double(row[k]);
    out << "\n";
  }
}

Embedding read_embedding(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty embedding file");
  std::size_t dim = 0;
  std::string kind;
  {
    std::istringstream hs(header);
    std::string tag, ver, field;
    hs >> tag >> ver;
    if (tag != "#" || ver != "psl-embed") throw ParseError("not a psl-embed file");
    while (hs >> field) {
      if (field.rfind("dim=", 0) == 0) dim = std::stoul(field.substr(4));
      else if (field.rfind("kind=", 0) == 0) kind = field.substr(5);
      else if (field != "v1") throw ParseError("unknown embedding header field: " + field);
    }
  }
  if (dim == 0) throw ParseError("embedding header missing dim");

  Embedding emb;
  emb.kind = embed_mode_from_string(kind);
  std::string line;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string label, tok;
    ls >> label;
    std::size_t count = 0;
    while (ls >> tok) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        std::ostringstream msg;
        msg << "line " << line_no << ": bad float '" << tok << "'";
        throw ParseError(msg.str());
      }
      values.push_back(v);
      ++count;
    }
    if (count != dim) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << dim << " values, got " << count;
      throw ParseError(msg.str());
    }
    emb.labels.push_back(label);
  }
  if (emb.labels.empty()) throw ParseError("embedding file has no rows");
  emb.coords.rows = emb.labels.size();
  emb.coords.cols = dim;
  emb.coords.data = std::move(values);
  return emb;
}

void write_embedding_file(const std::string& path, const Embedding& emb) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embedding file: " + path);
  write_embedding(out, emb);
}

Embedding read_embedding_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  try {
    return read_embedding(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace psl
