#include "psl/nn.hpp"

#include <cmath>

#include "psl/error.hpp"
#include "psl/rng.hpp"

namespace psl {

FeedForwardNet::FeedForwardNet(std::vector<int> layer_sizes, std::uint64_t seed)
    : layers_(std::move(layer_sizes)) {
  if (layers_.size() < 2) throw DataError("net needs at least input and output layers");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    weight_offsets_.push_back(total);
    total += static_cast<std::size_t>(layers_[l]) * layers_[l + 1];
    bias_offsets_.push_back(total);
    total += static_cast<std::size_t>(layers_[l + 1]);
  }
  params_.resize(total);

  SplitMix64 rng(seed);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const double bound = std::sqrt(6.0 / (layers_[l] + layers_[l + 1]));
    double* w = params_.data() + weight_offsets_[l];
    const std::size_t nw = static_cast<std::size_t>(layers_[l]) * layers_[l + 1];
    for (std::size_t i = 0; i < nw; ++i) w[i] = (2.0 * rng.next_double() - 1.0) * bound;
    // biases start at zero
  }
}

void FeedForwardNet::forward(std::span<const double> input, Workspace& ws) const {
  const std::size_t n_layers = layers_.size();
  ws.activations.resize(n_layers);
  ws.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    const int in = layers_[l];
    const int out = layers_[l + 1];
    const double* w = params_.data() + weight_offsets_[l];
    const double* b = params_.data() + bias_offsets_[l];
    const auto& a = ws.activations[l];
    auto& z = ws.activations[l + 1];
    z.assign(static_cast<std::size_t>(out), 0.0);
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      const double* wo = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) s += wo[i] * a[i];
      z[o] = s;
    }
    if (l + 2 < n_layers)  // hidden rectifier; output stays linear (logits)
      for (double& v : z) v = v > 0.0 ? v : 0.0;
  }
}

namespace {

void softmax_inplace(std::vector<double>& z) {
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

}  // namespace

std::vector<double> FeedForwardNet::predict(std::span<const double> input,
                                            Workspace& ws) const {
  forward(input, ws);
  std::vector<double> probs = ws.activations.back();
  softmax_inplace(probs);
  return probs;
}

double FeedForwardNet::batch_loss_grad(std::span<const std::size_t> idx,
                                       const std::vector<std::vector<double>>& inputs,
                                       const std::vector<int>& labels,
                                       std::span<double> grad, Workspace& ws) const {
  const std::size_t n_layers = layers_.size();
  ws.deltas.resize(n_layers);
  const double inv_batch = 1.0 / static_cast<double>(idx.size());
  double loss = 0.0;

  for (std::size_t s : idx) {
    forward(inputs[s], ws);
    std::vector<double> probs = ws.activations.back();
    softmax_inplace(probs);
    const int y = labels[s];
    const double p = std::max(probs[static_cast<std::size_t>(y)], 1e-300);
    loss += -std::log(p) * inv_batch;

    // Output delta: softmax + cross-entropy.
    auto& dout = ws.deltas[n_layers - 1];
    dout = probs;
    dout[static_cast<std::size_t>(y)] -= 1.0;
    for (double& v : dout) v *= inv_batch;

    for (std::size_t l = n_layers - 1; l-- > 0;) {
      const int in = layers_[l];
      const int out = layers_[l + 1];
      const double* w = params_.data() + weight_offsets_[l];
      double* gw = grad.data() + weight_offsets_[l];
      double* gb = grad.data() + bias_offsets_[l];
      const auto& a = ws.activations[l];
      const auto& d_next = ws.deltas[l + 1];

      for (int o = 0; o < out; ++o) {
        const double dn = d_next[static_cast<std::size_t>(o)];
        gb[o] += dn;
        double* gwo = gw + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) gwo[i] += dn * a[i];
      }
      if (l > 0) {
        auto& d_here = ws.deltas[l];
        d_here.assign(static_cast<std::size_t>(in), 0.0);
        for (int o = 0; o < out; ++o) {
          const double dn = d_next[static_cast<std::size_t>(o)];
          const double* wo = w + static_cast<std::size_t>(o) * in;
          for (int i = 0; i < in; ++i) d_here[static_cast<std::size_t>(i)] += dn * wo[i];
        }
        for (int i = 0; i < in; ++i)
          if (a[static_cast<std::size_t>(i)] <= 0.0) d_here[static_cast<std::size_t>(i)] = 0.0;
      }
    }
  }
  return loss;
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
  }
}

}  // namespace psl
