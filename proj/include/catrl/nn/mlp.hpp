#pragma once

#include <string>
#include <vector>

#include "catrl/common.hpp"

namespace catrl::nn {

enum class Activation { Elu, Tanh };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation act);

/// Fully connected network parameters. weights[l] has shape
/// (layer_sizes[l+1] x layer_sizes[l]); the hidden layers use `activation`,
/// the output layer is linear.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<MatrixXd> weights;
  std::vector<VectorXd> biases;
  Activation activation = Activation::Elu;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  Eigen::Index parameter_count() const;

  /// Shape and finiteness checks; throws ConfigError on violation.
  void validate() const;
};

/// Zero-initialized network with the given layout.
MlpParams make_mlp(const std::vector<int>& layer_sizes, Activation activation);

/// Orthogonal initialization: gain sqrt(2) on hidden layers, `final_gain` on
/// the output layer, zero biases.
void init_orthogonal(MlpParams& params, Rng& rng, double final_gain);

/// Activation trace from a forward pass. activations[0] is the input batch,
/// activations[l] the post-activation output of hidden layer l-1; one column
/// per sample.
struct ForwardCache {
  std::vector<MatrixXd> activations;
};

/// Batched forward pass, columns are samples. If `cache` is non-null it is
/// filled so that backward() can run against it.
MatrixXd forward(const MlpParams& params, const MatrixXd& input,
                 ForwardCache* cache = nullptr);

VectorXd forward1(const MlpParams& params, const VectorXd& input);

struct MlpGrads {
  std::vector<MatrixXd> weights;
  std::vector<VectorXd> biases;
};

MlpGrads zero_grads_like(const MlpParams& params);

/// Backpropagates `output_grad` (d loss / d output, one column per sample,
/// from the same batch as `cache`) and returns parameter gradients summed
/// over the batch. Throws std::logic_error on a cache that does not match
/// `params` or the gradient shape.
MlpGrads backward(const MlpParams& params, const ForwardCache& cache,
                  const MatrixXd& output_grad);

VectorXd flatten(const MlpParams& params);
VectorXd flatten(const MlpGrads& grads);
/// Writes `flat` back into `params` (layout must match flatten()).
void unflatten(const VectorXd& flat, MlpParams& params);

}  // namespace catrl::nn
