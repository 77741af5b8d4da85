#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace psl {

// Fully connected net with rectifier hidden units and a 2-way softmax
// output, parameters in one flat vector (per layer: weights row-major
// [out x in], then biases). Flat storage keeps the training step and the
// finite-difference checks over all parameters simple.
class FeedForwardNet {
 public:
  FeedForwardNet() = default;
  FeedForwardNet(std::vector<int> layer_sizes, std::uint64_t seed);

  const std::vector<int>& layers() const { return layers_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  struct Workspace {
    std::vector<std::vector<double>> activations;  // post-activation per layer
    std::vector<std::vector<double>> deltas;
  };

  // Output class probabilities for one input.
  std::vector<double> predict(std::span<const double> input, Workspace& ws) const;

  // Mean cross-entropy over the batch; accumulates d(loss)/d(params) into
  // `grad` (must be zeroed by the caller).
  double batch_loss_grad(std::span<const std::size_t> idx,
                         const std::vector<std::vector<double>>& inputs,
                         const std::vector<int>& labels, std::span<double> grad,
                         Workspace& ws) const;

 private:
  void forward(std::span<const double> input, Workspace& ws) const;

  std::vector<int> layers_;
  std::vector<double> params_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<std::size_t> bias_offsets_;
};

// Adam with the usual defaults (Kingma & Ba 2015).
class Adam {
 public:
  Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace psl
