#include "catrl/nn/mlp.hpp"

#include <Eigen/QR>

#include <cmath>
#include <stdexcept>

namespace catrl::nn {

Activation activation_from_string(const std::string& name) {
  if (name == "elu") return Activation::Elu;
  if (name == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation '" + name + "' (expected elu or tanh)");
}

std::string to_string(Activation act) {
  return act == Activation::Elu ? "elu" : "tanh";
}

namespace {

inline double elu(double z) { return z > 0.0 ? z : std::expm1(z); }

// Derivatives recovered from the stored post-activation value: elu is
// sign-preserving, so a > 0 iff z > 0, and elu'(z) = elu(z) + 1 for z <= 0.
inline double elu_deriv_from_value(double a) { return a > 0.0 ? 1.0 : a + 1.0; }
inline double tanh_deriv_from_value(double a) { return 1.0 - a * a; }

MatrixXd apply_activation(Activation act, MatrixXd z) {
  if (act == Activation::Elu) {
    return z.unaryExpr([](double v) { return elu(v); });
  }
  return z.array().tanh().matrix();
}

MatrixXd activation_deriv(Activation act, const MatrixXd& a) {
  if (act == Activation::Elu) {
    return a.unaryExpr([](double v) { return elu_deriv_from_value(v); });
  }
  return a.unaryExpr([](double v) { return tanh_deriv_from_value(v); });
}

}  // namespace

Eigen::Index MlpParams::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

void MlpParams::validate() const {
  if (layer_sizes.size() < 2) {
    throw ConfigError("mlp needs at least an input and an output layer");
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw ConfigError("mlp layer sizes must be positive");
  }
  if (weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size()) {
    throw ConfigError("mlp weight/bias count does not match layer_sizes");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l]) {
      throw ConfigError("mlp weight matrix " + std::to_string(l) + " has wrong shape");
    }
    if (biases[l].size() != layer_sizes[l + 1]) {
      throw ConfigError("mlp bias vector " + std::to_string(l) + " has wrong length");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      throw ConfigError("mlp parameters contain non-finite entries");
    }
  }
}

MlpParams make_mlp(const std::vector<int>& layer_sizes, Activation activation) {
  MlpParams p;
  p.layer_sizes = layer_sizes;
  p.activation = activation;
  if (layer_sizes.size() < 2) {
    throw ConfigError("mlp needs at least an input and an output layer");
  }
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    p.weights.emplace_back(MatrixXd::Zero(layer_sizes[l + 1], layer_sizes[l]));
    p.biases.emplace_back(VectorXd::Zero(layer_sizes[l + 1]));
  }
  p.validate();
  return p;
}

namespace {

MatrixXd orthogonal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool tall = rows >= cols;
  const Eigen::Index m = tall ? rows : cols;
  const Eigen::Index n = tall ? cols : rows;
  MatrixXd a(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(m, n);
  MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return tall ? q : MatrixXd(q.transpose());
}

}  // namespace

void init_orthogonal(MlpParams& params, Rng& rng, double final_gain) {
  const int layers = params.num_layers();
  for (int l = 0; l < layers; ++l) {
    const double gain = (l + 1 == layers) ? final_gain : std::sqrt(2.0);
    params.weights[l] = gain * orthogonal_matrix(params.weights[l].rows(),
                                                 params.weights[l].cols(), rng);
    params.biases[l].setZero();
  }
}

MatrixXd forward(const MlpParams& params, const MatrixXd& input, ForwardCache* cache) {
  if (input.rows() != params.input_dim()) {
    throw ConfigError("mlp forward: input has " + std::to_string(input.rows()) +
                      " rows, expected " + std::to_string(params.input_dim()));
  }
  if (!input.allFinite()) {
    throw TrainingError("mlp forward: non-finite input");
  }
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(input);
  }
  MatrixXd a = input;
  const int layers = params.num_layers();
  for (int l = 0; l < layers; ++l) {
    MatrixXd z = (params.weights[l] * a).colwise() + params.biases[l];
    if (l + 1 < layers) {
      a = apply_activation(params.activation, std::move(z));
      if (cache) cache->activations.push_back(a);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

VectorXd forward1(const MlpParams& params, const VectorXd& input) {
  return forward(params, MatrixXd(input)).col(0);
}

MlpGrads zero_grads_like(const MlpParams& params) {
  MlpGrads g;
  for (const auto& w : params.weights) g.weights.emplace_back(MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : params.biases) g.biases.emplace_back(VectorXd::Zero(b.size()));
  return g;
}

MlpGrads backward(const MlpParams& params, const ForwardCache& cache,
                  const MatrixXd& output_grad) {
  const int layers = params.num_layers();
  if (static_cast<int>(cache.activations.size()) != layers) {
    throw std::logic_error("mlp backward: cache does not match network depth");
  }
  if (output_grad.rows() != params.output_dim() ||
      output_grad.cols() != cache.activations[0].cols()) {
    throw std::logic_error("mlp backward: output gradient shape mismatch");
  }
  for (int l = 0; l < layers; ++l) {
    if (cache.activations[l].rows() != params.layer_sizes[l]) {
      throw std::logic_error("mlp backward: stale cache");
    }
  }

  MlpGrads grads = zero_grads_like(params);
  MatrixXd g = output_grad;
  for (int l = layers - 1; l >= 0; --l) {
    grads.weights[l].noalias() = g * cache.activations[l].transpose();
    grads.biases[l] = g.rowwise().sum();
    if (l > 0) {
      MatrixXd back = params.weights[l].transpose() * g;
      g = back.cwiseProduct(activation_deriv(params.activation, cache.activations[l]));
    }
  }
  return grads;
}

namespace {

template <typename Mats, typename Vecs>
VectorXd flatten_impl(const Mats& weights, const Vecs& biases) {
  Eigen::Index n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  VectorXd flat(n);
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.segment(at, weights[l].size()) = Eigen::Map<const VectorXd>(weights[l].data(), weights[l].size());
    at += weights[l].size();
    flat.segment(at, biases[l].size()) = biases[l];
    at += biases[l].size();
  }
  return flat;
}

}  // namespace

VectorXd flatten(const MlpParams& params) { return flatten_impl(params.weights, params.biases); }
VectorXd flatten(const MlpGrads& grads) { return flatten_impl(grads.weights, grads.biases); }

void unflatten(const VectorXd& flat, MlpParams& params) {
  if (flat.size() != params.parameter_count()) {
    throw std::logic_error("mlp unflatten: size mismatch");
  }
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    Eigen::Map<VectorXd>(params.weights[l].data(), params.weights[l].size()) =
        flat.segment(at, params.weights[l].size());
    at += params.weights[l].size();
    params.biases[l] = flat.segment(at, params.biases[l].size());
    at += params.biases[l].size();
  }
}

}  // namespace catrl::nn
