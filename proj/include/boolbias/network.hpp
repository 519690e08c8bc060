#pragma once

#ifndef EIGEN_DONT_PARALLELIZE
#define EIGEN_DONT_PARALLELIZE  // replica-level parallelism only; keeps runs deterministic
#endif

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boolbias/boolfunc.hpp"
#include "boolbias/rng.hpp"

namespace boolbias {

enum class Activation { kTanh, kRelu };
enum class WeightConvention { kFanInScaled, kUnscaled };

/// Fully connected architecture: n_in -> width x depth -> 1, with Gaussian
/// initialization of scale sigma_w (per-weight std sigma_w/sqrt(fan_in) under
/// the fan_in_scaled convention) and bias scale sigma_b. sigma_b defaults to
/// 0.1*sigma_w when unset.
struct NetConfig {
  int n_in = 7;
  int depth = 10;  // hidden layers
  int width = 40;
  Activation activation = Activation::kTanh;
  double sigma_w = 1.0;
  std::optional<double> sigma_b;
  WeightConvention weight_convention = WeightConvention::kFanInScaled;

  double effective_sigma_b() const {
    return sigma_b.value_or(0.1 * sigma_w);
  }

  void validate() const {
    if (n_in < BoolFn::kMinArity || n_in > BoolFn::kMaxArity)
      throw std::invalid_argument("n_in must be in [2,10]");
    if (depth < 1 || depth > 10)
      throw std::invalid_argument("depth must be in [1,10]");
    if (width < 1) throw std::invalid_argument("width must be >= 1");
    if (!(sigma_w > 0.0)) throw std::invalid_argument("sigma_w must be > 0");
    if (effective_sigma_b() < 0.0)
      throw std::invalid_argument("sigma_b must be >= 0");
  }
};

/// One concrete parameter assignment. weights[l] is (fan_in x fan_out); the
/// last layer maps width -> 1.
struct ParamSet {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int layer_count() const { return static_cast<int>(weights.size()); }
};

namespace detail {

inline void fill_gaussian(Eigen::MatrixXd& m, double std_dev, Rng& rng) {
  double* p = m.data();
  const auto count = static_cast<std::size_t>(m.size());
  for (std::size_t i = 0; i < count; ++i) p[i] = std_dev * rng.next_gaussian();
}

inline void fill_gaussian(Eigen::VectorXd& v, double std_dev, Rng& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = std_dev * rng.next_gaussian();
}

inline void apply_activation(Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::kTanh)
    z = z.array().tanh();
  else
    z = z.array().max(0.0);
}

}  // namespace detail

inline double weight_std(const NetConfig& cfg, int fan_in) {
  return cfg.weight_convention == WeightConvention::kFanInScaled
             ? cfg.sigma_w / std::sqrt(static_cast<double>(fan_in))
             : cfg.sigma_w;
}

/// Draws all parameters. Layers are filled in order, weight matrix first
/// (column-major element order) then bias; this ordering is part of the
/// seed contract.
inline ParamSet sample_params(const NetConfig& cfg, Rng& rng) {
  cfg.validate();
  ParamSet p;
  const double sb = cfg.effective_sigma_b();
  int fan_in = cfg.n_in;
  for (int l = 0; l <= cfg.depth; ++l) {
    const int fan_out = (l == cfg.depth) ? 1 : cfg.width;
    Eigen::MatrixXd w(fan_in, fan_out);
    detail::fill_gaussian(w, weight_std(cfg, fan_in), rng);
    Eigen::VectorXd b(fan_out);
    detail::fill_gaussian(b, sb, rng);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
    fan_in = fan_out;
  }
  return p;
}

/// All 2^n Boolean inputs as rows, input i being the binary expansion of i
/// (most significant input bit first).
inline const Eigen::MatrixXd& all_inputs(int n) {
  static std::array<std::optional<Eigen::MatrixXd>, BoolFn::kMaxArity + 1> cache;
  auto& slot = cache[static_cast<std::size_t>(n)];
  if (!slot) {
    Eigen::MatrixXd x(1 << n, n);
    for (int i = 0; i < (1 << n); ++i)
      for (int j = 0; j < n; ++j)
        x(i, j) = static_cast<double>((i >> (n - 1 - j)) & 1);
    slot = std::move(x);
  }
  return *slot;
}

/// Pre-threshold network outputs for a batch of inputs (rows).
inline Eigen::VectorXd forward_batch(const ParamSet& p, const NetConfig& cfg,
                                     const Eigen::MatrixXd& x) {
  if (x.cols() != cfg.n_in)
    throw std::invalid_argument("input width does not match n_in");
  Eigen::MatrixXd a = x;
  for (int l = 0; l < cfg.depth; ++l) {
    Eigen::MatrixXd z = (a * p.weights[static_cast<std::size_t>(l)]).rowwise() +
                        p.biases[static_cast<std::size_t>(l)].transpose();
    detail::apply_activation(z, cfg.activation);
    a = std::move(z);
  }
  return (a * p.weights.back()).col(0).array() + p.biases.back()[0];
}

inline double forward(const ParamSet& p, const NetConfig& cfg,
                      std::span<const std::uint8_t> input) {
  if (static_cast<int>(input.size()) != cfg.n_in)
    throw std::invalid_argument("input width does not match n_in");
  Eigen::MatrixXd x(1, cfg.n_in);
  for (int j = 0; j < cfg.n_in; ++j) {
    if (input[static_cast<std::size_t>(j)] > 1)
      throw std::invalid_argument("inputs must be 0/1");
    x(0, j) = static_cast<double>(input[static_cast<std::size_t>(j)]);
  }
  return forward_batch(p, cfg, x)[0];
}

/// Workspace for the sampling hot path; reuse across calls to avoid
/// reallocating the activation buffers.
struct ForwardWorkspace {
  Eigen::MatrixXd a;
  Eigen::MatrixXd z;
  Eigen::VectorXd out;
};

inline void forward_all(const ParamSet& p, const NetConfig& cfg,
                        ForwardWorkspace& ws) {
  const Eigen::MatrixXd& x = all_inputs(cfg.n_in);
  ws.z.noalias() = x * p.weights[0];
  ws.z.rowwise() += p.biases[0].transpose();
  detail::apply_activation(ws.z, cfg.activation);
  ws.a.swap(ws.z);
  for (int l = 1; l < cfg.depth; ++l) {
    ws.z.resize(ws.a.rows(), p.weights[static_cast<std::size_t>(l)].cols());
    ws.z.noalias() = ws.a * p.weights[static_cast<std::size_t>(l)];
    ws.z.rowwise() += p.biases[static_cast<std::size_t>(l)].transpose();
    detail::apply_activation(ws.z, cfg.activation);
    ws.a.swap(ws.z);
  }
  ws.out.noalias() = ws.a * p.weights.back();
  ws.out.array() += p.biases.back()[0];
}

/// Thresholds the network into a Boolean function: bit i is 1 iff the output
/// on input i is strictly positive (an exact 0.0 maps to label 0).
inline BoolFn to_function(const ParamSet& p, const NetConfig& cfg,
                          ForwardWorkspace& ws) {
  forward_all(p, cfg, ws);
  BoolFn f(cfg.n_in);
  for (int i = 0; i < f.size(); ++i) f.set(i, ws.out[i] > 0.0);
  return f;
}

inline BoolFn to_function(const ParamSet& p, const NetConfig& cfg) {
  ForwardWorkspace ws;
  return to_function(p, cfg, ws);
}

}  // namespace boolbias
