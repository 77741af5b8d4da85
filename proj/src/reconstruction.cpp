#include "psl/reconstruction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "psl/error.hpp"
#include "psl/rng.hpp"

namespace psl {

double dot_score(const Embedding& emb, Edge e) {
  return row_dot(emb.coords, e.first, e.second);
}

namespace {

std::vector<double> pair_feature(const Embedding& emb, std::uint32_t i, std::uint32_t j) {
  std::vector<double> f(2 * emb.dim());
  const double* a = emb.coords.row(i);
  const double* b = emb.coords.row(j);
  std::copy(a, a + emb.dim(), f.begin());
  std::copy(b, b + emb.dim(), f.begin() + static_cast<std::ptrdiff_t>(emb.dim()));
  return f;
}

struct Dataset {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  FeatureScale scale;
};

// Both orders of every pair, standardized per feature.
Dataset build_dataset(const Embedding& emb, const EdgeList& positives,
                      const EdgeList& negatives) {
  Dataset ds;
  ds.inputs.reserve(2 * (positives.size() + negatives.size()));
  auto add = [&](const EdgeList& list, int label) {
    for (const auto& [i, j] : list) {
      ds.inputs.push_back(pair_feature(emb, i, j));
      ds.labels.push_back(label);
      ds.inputs.push_back(pair_feature(emb, j, i));
      ds.labels.push_back(label);
    }
  };
  add(positives, 1);
  add(negatives, 0);

  const std::size_t width = 2 * emb.dim();
  const double n = static_cast<double>(ds.inputs.size());
  ds.scale.mean.assign(width, 0.0);
  ds.scale.inv_sd.assign(width, 1.0);
  for (const auto& x : ds.inputs)
    for (std::size_t k = 0; k < width; ++k) ds.scale.mean[k] += x[k] / n;
  for (std::size_t k = 0; k < width; ++k) {
    double ss = 0.0;
    for (const auto& x : ds.inputs) {
      const double dev = x[k] - ds.scale.mean[k];
      ss += dev * dev;
    }
    const double sd = std::sqrt(ss / n);
    ds.scale.inv_sd[k] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  for (auto& x : ds.inputs)
    for (std::size_t k = 0; k < width; ++k) x[k] = (x[k] - ds.scale.mean[k]) * ds.scale.inv_sd[k];
  return ds;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

MlpModel train_mlp(const Embedding& emb, const Dataset& ds, const TrainOptions& opts) {
  const int in_dim = static_cast<int>(2 * emb.dim());
  MlpModel model;
  model.emb_dim = emb.dim();
  model.emb_kind = emb.kind;
  model.scale = ds.scale;
  model.net = FeedForwardNet({in_dim, 32, 16, 8, 4, 2}, derive_seed(opts.seed, 0));

  const std::size_t n = ds.inputs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  Adam adam(model.net.param_count(), opts.lr);
  std::vector<double> grad(model.net.param_count());
  FeedForwardNet::Workspace ws;
  SplitMix64 shuffle_rng(derive_seed(opts.seed, 1));

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(shuffle_rng.next_below(n - i));
      std::swap(order[i], order[j]);
    }
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(opts.batch)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(opts.batch));
      std::fill(grad.begin(), grad.end(), 0.0);
      const double loss = model.net.batch_loss_grad(
          std::span<const std::size_t>(order.data() + start, stop - start), ds.inputs,
          ds.labels, grad, ws);
      if (!std::isfinite(loss))
        throw NumericalError("classifier training diverged (loss is not finite); try a smaller lr");
      adam.step(model.net.params(), grad);
    }
  }
  return model;
}

LogRegModel train_logreg(const Embedding& emb, const Dataset& ds, const TrainOptions& opts) {
  const std::size_t in_dim = 2 * emb.dim();
  LogRegModel model;
  model.emb_dim = emb.dim();
  model.emb_kind = emb.kind;
  model.scale = ds.scale;
  model.weights.assign(in_dim, 0.0);
  model.bias = 0.0;

  const std::size_t n = ds.inputs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::vector<double> params(in_dim + 1, 0.0);
  Adam adam(params.size(), opts.lr);
  std::vector<double> grad(params.size());
  SplitMix64 shuffle_rng(derive_seed(opts.seed, 1));

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(shuffle_rng.next_below(n - i));
      std::swap(order[i], order[j]);
    }
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(opts.batch)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(opts.batch));
      std::fill(grad.begin(), grad.end(), 0.0);
      const double inv = 1.0 / static_cast<double>(stop - start);
      double loss = 0.0;
      for (std::size_t s = start; s < stop; ++s) {
        const auto& x = ds.inputs[order[s]];
        const int y = ds.labels[order[s]];
        double z = params[in_dim];
        for (std::size_t k = 0; k < in_dim; ++k) z += params[k] * x[k];
        const double p = sigmoid(z);
        loss += -(y ? std::log(std::max(p, 1e-300))
                    : std::log(std::max(1.0 - p, 1e-300))) * inv;
        const double delta = (p - static_cast<double>(y)) * inv;
        for (std::size_t k = 0; k < in_dim; ++k) grad[k] += delta * x[k];
        grad[in_dim] += delta;
      }
      if (!std::isfinite(loss))
        throw NumericalError("classifier training diverged (loss is not finite); try a smaller lr");
      adam.step(params, grad);
    }
  }
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(in_dim),
            model.weights.begin());
  model.bias = params[in_dim];
  return model;
}

void apply_scale(const FeatureScale& scale, std::vector<double>& f) {
  if (scale.mean.size() != f.size()) return;  // legacy model without scaling
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = (f[k] - scale.mean[k]) * scale.inv_sd[k];
}

double predict_one_order(const Model& model, const Embedding& emb, std::uint32_t i,
                         std::uint32_t j, FeedForwardNet::Workspace& ws) {
  std::vector<double> f = pair_feature(emb, i, j);
  if (const auto* mlp = std::get_if<MlpModel>(&model)) {
    apply_scale(mlp->scale, f);
    return mlp->net.predict(f, ws)[1];
  }
  const auto& lr = std::get<LogRegModel>(model);
  apply_scale(lr.scale, f);
  double z = lr.bias;
  for (std::size_t k = 0; k < f.size(); ++k) z += lr.weights[k] * f[k];
  return sigmoid(z);
}

}  // namespace

Model train_classifier(const Embedding& emb, const EdgeList& positives,
                       const EdgeList& negatives, ClassifierKind kind,
                       const TrainOptions& opts) {
  if (positives.empty()) throw DataError("classifier training needs positive examples");
  if (negatives.empty()) throw DataError("classifier training needs negative examples");
  const Dataset ds = build_dataset(emb, positives, negatives);
  if (kind == ClassifierKind::mlp) return train_mlp(emb, ds, opts);
  return train_logreg(emb, ds, opts);
}

std::size_t model_emb_dim(const Model& model) {
  if (const auto* mlp = std::get_if<MlpModel>(&model)) return mlp->emb_dim;
  return std::get<LogRegModel>(model).emb_dim;
}

double model_score(const Model& model, const Embedding& emb, Edge e) {
  if (model_emb_dim(model) != emb.dim())
    throw DataError("model/embedding dimension mismatch");
  FeedForwardNet::Workspace ws;
  return 0.5 * (predict_one_order(model, emb, e.first, e.second, ws) +
                predict_one_order(model, emb, e.second, e.first, ws));
}

ScoredEdges score_edges(const Model& model, const Embedding& emb,
                        const EdgeList& candidates) {
  if (model_emb_dim(model) != emb.dim())
    throw DataError("model/embedding dimension mismatch");
  FeedForwardNet::Workspace ws;
  ScoredEdges out;
  out.reserve(candidates.size());
  for (const auto& e : candidates) {
    const double s = 0.5 * (predict_one_order(model, emb, e.first, e.second, ws) +
                            predict_one_order(model, emb, e.second, e.first, ws));
    out.push_back({e, s});
  }
  return out;
}

ScoredEdges score_edges_dot(const Embedding& emb, const EdgeList& candidates) {
  ScoredEdges out;
  out.reserve(candidates.size());
  for (const auto& e : candidates) out.push_back({e, dot_score(emb, e)});
  return out;
}

void write_scored_tsv(std::ostream& out, ScoredEdges scored,
                      const std::vector<std::string>& labels) {
  std::stable_sort(scored.begin(), scored.end(), [](const ScoredEdge& a, const ScoredEdge& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.e < b.e;
  });
  for (const auto& [e, s] : scored)
    out << labels[e.first] << "\t" << labels[e.second] << "\t" << format_double(s) << "\n";
}

namespace {

void write_params(std::ostream& out, const char* tag, const std::vector<double>& params) {
  out << tag << " " << params.size() << "\n";
  for (double v : params) out << format_double(v) << "\n";
}

std::vector<double> read_params(std::istream& in, const char* expected) {
  std::string tag;
  std::size_t count = 0;
  in >> tag >> count;
  if (tag != expected)
    throw ParseError(std::string("model file: expected ") + expected + " section");
  std::vector<double> params(count);
  for (auto& v : params)
    if (!(in >> v)) throw ParseError("model file: truncated section");
  return params;
}

void write_scale(std::ostream& out, const FeatureScale& scale) {
  write_params(out, "scale_mean", scale.mean);
  write_params(out, "scale_inv_sd", scale.inv_sd);
}

FeatureScale read_scale(std::istream& in) {
  FeatureScale scale;
  scale.mean = read_params(in, "scale_mean");
  scale.inv_sd = read_params(in, "scale_inv_sd");
  if (scale.mean.size() != scale.inv_sd.size())
    throw ParseError("model file: scale size mismatch");
  return scale;
}

}  // namespace

void write_model(std::ostream& out, const Model& model) {
  if (const auto* mlp = std::get_if<MlpModel>(&model)) {
    out << "# psl-model v1 kind=mlp emb_dim=" << mlp->emb_dim
        << " emb_kind=" << to_string(mlp->emb_kind) << " hidden=relu out=softmax\n";
    out << "layers";
    for (int s : mlp->net.layers()) out << " " << s;
    out << "\n";
    write_scale(out, mlp->scale);
    write_params(out, "params", mlp->net.params());
    return;
  }
  const auto& lr = std::get<LogRegModel>(model);
  out << "# psl-model v1 kind=logreg emb_dim=" << lr.emb_dim
      << " emb_kind=" << to_string(lr.emb_kind) << "\n";
  write_scale(out, lr.scale);
  std::vector<double> params = lr.weights;
  params.push_back(lr.bias);
  write_params(out, "params", params);
}

Model read_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty model file");
  std::istringstream hs(header);
  std::string tag, ver, field, kind, emb_kind;
  std::size_t emb_dim = 0;
  hs >> tag >> ver;
  if (tag != "#" || ver != "psl-model") throw ParseError("not a psl-model file");
  while (hs >> field) {
    if (field.rfind("kind=", 0) == 0) kind = field.substr(5);
    else if (field.rfind("emb_dim=", 0) == 0) emb_dim = std::stoul(field.substr(8));
    else if (field.rfind("emb_kind=", 0) == 0) emb_kind = field.substr(9);
    else if (field == "hidden=relu" || field == "out=softmax") continue;
    else if (field != "v1") throw ParseError("unknown model header field: " + field);
  }
  if (emb_dim == 0) throw ParseError("model header missing emb_dim");

  if (kind == "mlp") {
    std::string ltag;
    in >> ltag;
    if (ltag != "layers") throw ParseError("model file: expected layers section");
    std::string rest;
    std::getline(in, rest);
    std::istringstream ls(rest);
    std::vector<int> layers;
    int v;
    while (ls >> v) layers.push_back(v);
    MlpModel model;
    model.emb_dim = emb_dim;
    model.emb_kind = embed_mode_from_string(emb_kind);
    model.net = FeedForwardNet(layers, 0);
    model.scale = read_scale(in);
    std::vector<double> params = read_params(in, "params");
    if (params.size() != model.net.param_count())
      throw ParseError("model file: parameter count mismatch");
    model.net.params() = std::move(params);
    return model;
  }
  if (kind == "logreg") {
    LogRegModel model;
    model.emb_dim = emb_dim;
    model.emb_kind = embed_mode_from_string(emb_kind);
    model.scale = read_scale(in);
    std::vector<double> params = read_params(in, "params");
    if (params.size() != 2 * emb_dim + 1)
      throw ParseError("model file: parameter count mismatch");
    model.bias = params.back();
    params.pop_back();
    model.weights = std::move(params);
    return model;
  }
  throw ParseError("unknown model kind: " + kind);
}

void write_model_file(const std::string& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  write_model(out, model);
}

Model read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  try {
    return read_model(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace psl
