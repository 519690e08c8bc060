#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "boolbias/boolfunc.hpp"
#include "boolbias/complexity.hpp"
#include "boolbias/network.hpp"
#include "boolbias/parallel.hpp"
#include "boolbias/rng.hpp"
#include "boolbias/sampler.hpp"

namespace boolbias {

enum class OptAlgorithm { kSgd, kAdam };
enum class LossKind { kCrossEntropy, kMse };

/// Mini-batch optimizer settings. Cross-entropy trains a sigmoid link on the
/// single logit with 0/1 labels; MSE trains the raw output against -1/+1
/// targets. The decision boundary is output > 0 in both cases.
struct OptConfig {
  OptAlgorithm algorithm = OptAlgorithm::kAdam;
  double learning_rate = 1e-3;
  int batch_size = 16;
  LossKind loss = LossKind::kCrossEntropy;
  int max_epochs = 5000;

  void validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  }
};

struct TrainOutcome {
  BoolFn learned;
  int epochs = 0;  // epochs until the first zero-training-error check
  bool converged = false;
  FnError gen_error{0.0};
  KValue k_learned = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

// rng stream purposes; part of the seed contract
inline constexpr std::uint64_t kStreamInit = 1;
inline constexpr std::uint64_t kStreamShuffle = 2;
inline constexpr std::uint64_t kStreamSplit = 3;
inline constexpr std::uint64_t kStreamRun = 4;
inline constexpr std::uint64_t kStreamFeatures = 5;
inline constexpr std::uint64_t kStreamReadout = 6;

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  long t = 0;

  void init(const ParamSet& p) {
    for (const auto& w : p.weights) {
      mw.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
      vw.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : p.biases) {
      mb.emplace_back(Eigen::VectorXd::Zero(b.size()));
      vb.emplace_back(Eigen::VectorXd::Zero(b.size()));
    }
  }
};

/// Batched backprop trainer for the single-logit network.
class Mlp {
 public:
  Mlp(const NetConfig& cfg, const OptConfig& opt, ParamSet params)
      : cfg_(cfg), opt_(opt), p_(std::move(params)) {
    if (opt_.algorithm == OptAlgorithm::kAdam) adam_.init(p_);
  }

  const ParamSet& params() const { return p_; }

  Eigen::VectorXd logits(const Eigen::MatrixXd& x) {
    return forward_batch(p_, cfg_, x);
  }

  double loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01) {
    const Eigen::VectorXd z = logits(x);
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (opt_.loss == LossKind::kCrossEntropy) {
        // log(1+e^z) - y*z, evaluated stably
        const double zi = z[i];
        total += std::max(zi, 0.0) + std::log1p(std::exp(-std::abs(zi))) -
                 y01[i] * zi;
      } else {
        const double t = 2.0 * y01[i] - 1.0;
        const double d = z[i] - t;
        total += d * d;
      }
    }
    return total / static_cast<double>(z.size());
  }

  void step(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01) {
    const auto batch = x.rows();
    // forward, keeping activations
    acts_.assign(1, x);
    for (int l = 0; l < cfg_.depth; ++l) {
      Eigen::MatrixXd z =
          (acts_.back() * p_.weights[static_cast<std::size_t>(l)]).rowwise() +
          p_.biases[static_cast<std::size_t>(l)].transpose();
      apply_activation(z, cfg_.activation);
      acts_.push_back(std::move(z));
    }
    Eigen::VectorXd z_out =
        (acts_.back() * p_.weights.back()).col(0).array() + p_.biases.back()[0];

    // output delta
    Eigen::VectorXd delta(batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
      if (opt_.loss == LossKind::kCrossEntropy) {
        const double prob = 1.0 / (1.0 + std::exp(-z_out[i]));
        delta[i] = (prob - y01[i]) / static_cast<double>(batch);
      } else {
        const double t = 2.0 * y01[i] - 1.0;
        delta[i] = 2.0 * (z_out[i] - t) / static_cast<double>(batch);
      }
    }

    const int layers = p_.layer_count();
    grad_w_.resize(static_cast<std::size_t>(layers));
    grad_b_.resize(static_cast<std::size_t>(layers));
    Eigen::MatrixXd d = delta;
    for (int l = layers - 1; l >= 0; --l) {
      grad_w_[static_cast<std::size_t>(l)].noalias() =
          acts_[static_cast<std::size_t>(l)].transpose() * d;
      grad_b_[static_cast<std::size_t>(l)] = d.colwise().sum();
      if (l == 0) break;
      Eigen::MatrixXd back =
          d * p_.weights[static_cast<std::size_t>(l)].transpose();
      const auto& a = acts_[static_cast<std::size_t>(l)];
      if (cfg_.activation == Activation::kTanh)
        d = back.array() * (1.0 - a.array().square());
      else
        d = back.array() * (a.array() > 0.0).cast<double>();
    }
    apply_update();
  }

 private:
  static void apply_activation(Eigen::MatrixXd& z, Activation a) {
    detail::apply_activation(z, a);
  }

  void apply_update() {
    const int layers = p_.layer_count();
    if (opt_.algorithm == OptAlgorithm::kSgd) {
      for (int l = 0; l < layers; ++l) {
        p_.weights[static_cast<std::size_t>(l)] -=
            opt_.learning_rate * grad_w_[static_cast<std::size_t>(l)];
        p_.biases[static_cast<std::size_t>(l)] -=
            opt_.learning_rate * grad_b_[static_cast<std::size_t>(l)];
      }
      return;
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++adam_.t;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_.t));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_.t));
    for (int l = 0; l < layers; ++l) {
      const auto idx = static_cast<std::size_t>(l);
      adam_.mw[idx] = kBeta1 * adam_.mw[idx] + (1 - kBeta1) * grad_w_[idx];
      adam_.vw[idx] = kBeta2 * adam_.vw[idx].array() +
                      (1 - kBeta2) * grad_w_[idx].array().square();
      p_.weights[idx].array() -=
          opt_.learning_rate * (adam_.mw[idx].array() / c1) /
          ((adam_.vw[idx].array() / c2).sqrt() + kEps);
      adam_.mb[idx] = kBeta1 * adam_.mb[idx] + (1 - kBeta1) * grad_b_[idx];
      adam_.vb[idx] = kBeta2 * adam_.vb[idx].array() +
                      (1 - kBeta2) * grad_b_[idx].array().square();
      p_.biases[idx].array() -=
          opt_.learning_rate * (adam_.mb[idx].array() / c1) /
          ((adam_.vb[idx].array() / c2).sqrt() + kEps);
    }
  }

  NetConfig cfg_;
  OptConfig opt_;
  ParamSet p_;
  AdamState adam_;
  std::vector<Eigen::MatrixXd> acts_;
  std::vector<Eigen::MatrixXd> grad_w_;
  std::vector<Eigen::VectorXd> grad_b_;
};

}  // namespace detail

/// Trains until the thresholded predictions first match the target on every
/// training index (checked once per epoch), or until max_epochs. Non-
/// convergence is a reported state, not an error.
inline TrainOutcome train_to_zero_error(const NetConfig& cfg,
                                        const BoolFn& target,
                                        const TrainSplit& split,
                                        const OptConfig& opt,
                                        std::uint64_t seed) {
  cfg.validate();
  opt.validate();
  if (target.arity() != cfg.n_in)
    throw std::invalid_argument("target arity does not match n_in");

  const int m = split.m;
  const int batch = std::min(opt.batch_size, m);
  Eigen::MatrixXd x_train(m, cfg.n_in);
  Eigen::VectorXd y_train(m);
  const Eigen::MatrixXd& x_all = all_inputs(cfg.n_in);
  for (int r = 0; r < m; ++r) {
    const int idx = split.train_idx[static_cast<std::size_t>(r)];
    x_train.row(r) = x_all.row(idx);
    y_train[r] = target.get(idx) ? 1.0 : 0.0;
  }

  Rng init_rng(seed, detail::kStreamInit, 0);
  Rng shuffle_rng(seed, detail::kStreamShuffle, 0);
  detail::Mlp net(cfg, opt, sample_params(cfg, init_rng));

  TrainOutcome out;
  out.seed = seed;
  out.initial_loss = net.loss(x_train, y_train);

  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  Eigen::MatrixXd xb(batch, cfg.n_in);
  Eigen::VectorXd yb(batch);

  int epoch = 0;
  for (; epoch < opt.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (int start = 0; start < m; start += batch) {
      const int sz = std::min(batch, m - start);
      for (int r = 0; r < sz; ++r) {
        const int src = order[static_cast<std::size_t>(start + r)];
        xb.row(r) = x_train.row(src);
        yb[r] = y_train[src];
      }
      if (sz == batch) {
        net.step(xb, yb);
      } else {
        net.step(xb.topRows(sz), yb.head(sz));
      }
    }
    const Eigen::VectorXd z = net.logits(x_train);
    bool all_correct = true;
    for (int r = 0; r < m; ++r) {
      if ((z[r] > 0.0) != (y_train[r] > 0.5)) {
        all_correct = false;
        break;
      }
    }
    if (all_correct) {
      out.converged = true;
      ++epoch;
      break;
    }
  }
  out.epochs = epoch;
  out.final_loss = net.loss(x_train, y_train);
  out.learned = to_function(net.params(), cfg);
  out.gen_error = gen_error(out.learned, target, split);
  out.k_learned = lz_complexity(out.learned);
  return out;
}

/// Training outcomes plus the two marginal histograms of the optimizer
/// posterior: by complexity, P(K|S), and by generalization error. Both are
/// normalized over converged runs only.
struct PosteriorCensus {
  std::vector<TrainOutcome> outcomes;
  std::map<KValue, double> by_k;
  std::map<double, double> by_err;
  BoolFn modal;
  int converged_count = 0;
  int pinv_fallbacks = 0;  // only used by the linearized-GP route

  void finalize() {
    by_k.clear();
    by_err.clear();
    converged_count = 0;
    std::map<BoolFn, int> fn_counts;
    for (const auto& o : outcomes) {
      if (!o.converged) continue;
      ++converged_count;
      by_k[o.k_learned] += 1.0;
      by_err[o.gen_error.value] += 1.0;
      ++fn_counts[o.learned];
    }
    if (converged_count == 0) return;
    for (auto& [k, v] : by_k) v /= converged_count;
    for (auto& [e, v] : by_err) v /= converged_count;
    int best = 0;
    for (const auto& [fn, c] : fn_counts) {
      if (c > best) {
        best = c;
        modal = fn;
      }
    }
  }

  double mode_k() const {
    double arg = 0.0, best = -1.0;
    for (const auto& [k, v] : by_k) {
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    return arg;
  }

  double mean_gen_error() const {
    double s = 0.0;
    for (const auto& o : outcomes)
      if (o.converged) s += o.gen_error.value;
    return converged_count ? s / converged_count : 0.0;
  }
};

/// Random strings binned by LZ complexity: permutations of fixed-ones-count
/// strings, plus random blocks of length 2^l tiled to the full length, which
/// reach low complexity at high entropy. Each bin keeps up to `keep_per_bin`
/// distinct functions.
inline std::map<KValue, std::vector<BoolFn>> generate_targets(
    int n, std::uint64_t attempts_per_entropy, std::uint64_t seed,
    std::size_t keep_per_bin = 32) {
  const int length = 1 << n;
  std::map<KValue, std::vector<BoolFn>> bins;
  std::set<BoolFn> seen;
  auto consider = [&](const BoolFn& f) {
    if (!seen.insert(f).second) return;
    auto& bin = bins[lz_complexity(f)];
    if (bin.size() < keep_per_bin) bin.push_back(f);
  };

  std::uint64_t draw = 0;
  for (int ones = 0; ones <= length; ++ones) {
    std::string base(static_cast<std::size_t>(length), '0');
    std::fill(base.begin(), base.begin() + ones, '1');
    for (std::uint64_t a = 0; a < attempts_per_entropy; ++a) {
      Rng rng(seed, draw++);
      std::vector<char> perm(base.begin(), base.end());
      rng.shuffle(perm);
      BoolFn f(n);
      for (int i = 0; i < length; ++i) f.set(i, perm[static_cast<std::size_t>(i)] == '1');
      consider(f);
    }
  }
  // tiled variant: random 2^l block repeated 2^(n-l) times
  for (int l = 1; l < n; ++l) {
    for (std::uint64_t a = 0; a < attempts_per_entropy; ++a) {
      Rng rng(seed, draw++);
      const int block = 1 << l;
      BoolFn f(n);
      for (int i = 0; i < block; ++i) {
        const bool bit = rng.next_bit();
        for (int rep = 0; rep < length / block; ++rep)
          f.set(rep * block + i, bit);
      }
      consider(f);
    }
  }
  return bins;
}

struct GenCurvePoint {
  KValue k_target = 0.0;
  double mean_gen_error = 0.0;
  double std_gen_error = 0.0;
  double convergence_rate = 0.0;
  bool included = true;  // false when the convergence rate fell below 1/2
};

/// Mean/stddev of the generalization error after training to zero error, per
/// target complexity. Each run draws a fresh split and initialization.
inline std::vector<GenCurvePoint> gen_error_vs_complexity(
    const NetConfig& cfg, const OptConfig& opt, int m, int runs_per_target,
    const std::map<KValue, BoolFn>& targets, std::uint64_t seed,
    unsigned workers = 0) {
  std::vector<std::pair<KValue, BoolFn>> list(targets.begin(), targets.end());
  std::vector<std::vector<TrainOutcome>> results(list.size());
  for (auto& r : results) r.resize(static_cast<std::size_t>(runs_per_target));

  const std::uint64_t total =
      list.size() * static_cast<std::uint64_t>(runs_per_target);
  parallel_regions(total, workers, [&](unsigned, std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t j = b; j < e; ++j) {
      const std::size_t t = j / static_cast<std::uint64_t>(runs_per_target);
      const std::uint64_t run = j % static_cast<std::uint64_t>(runs_per_target);
      const std::uint64_t run_seed = stream_seed(seed, detail::kStreamRun, j);
      Rng split_rng(run_seed, detail::kStreamSplit, 0);
      const TrainSplit s = split(cfg.n_in, m, split_rng);
      results[t][run] = train_to_zero_error(cfg, list[t].second, s, opt, run_seed);
    }
  });

  std::vector<GenCurvePoint> curve;
  for (std::size_t t = 0; t < list.size(); ++t) {
    GenCurvePoint pt;
    pt.k_target = list[t].first;
    int conv = 0;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& o : results[t]) {
      if (!o.converged) continue;
      ++conv;
      sum += o.gen_error.value;
      sumsq += o.gen_error.value * o.gen_error.value;
    }
    pt.convergence_rate = static_cast<double>(conv) / runs_per_target;
    if (conv > 0) {
      pt.mean_gen_error = sum / conv;
      const double var = sumsq / conv - pt.mean_gen_error * pt.mean_gen_error;
      pt.std_gen_error = std::sqrt(std::max(0.0, var));
    }
    pt.included = pt.convergence_rate >= 0.5;
    curve.push_back(pt);
  }
  return curve;
}

/// Independent trainings against one target. resample_split draws a fresh
/// training set per run; otherwise a single split (derived from the seed) is
/// shared by every run.
inline PosteriorCensus scatter_experiment(const NetConfig& cfg,
                                          const OptConfig& opt,
                                          const BoolFn& target, int m,
                                          int runs, std::uint64_t seed,
                                          bool resample_split = true,
                                          unsigned workers = 0) {
  PosteriorCensus census;
  census.outcomes.resize(static_cast<std::size_t>(runs));
  Rng fixed_split_rng(seed, detail::kStreamSplit, ~std::uint64_t{0});
  const TrainSplit fixed = split(cfg.n_in, m, fixed_split_rng);

  parallel_regions(static_cast<std::uint64_t>(runs), workers,
                   [&](unsigned, std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t r = b; r < e; ++r) {
      const std::uint64_t run_seed = stream_seed(seed, detail::kStreamRun, r);
      TrainSplit s = fixed;
      if (resample_split) {
        Rng split_rng(run_seed, detail::kStreamSplit, 0);
        s = split(cfg.n_in, m, split_rng);
      }
      census.outcomes[r] = train_to_zero_error(cfg, target, s, opt, run_seed);
    }
  });
  census.finalize();
  return census;
}

}  // namespace boolbias
