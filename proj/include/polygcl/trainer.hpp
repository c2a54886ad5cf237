#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "polygcl/augment.hpp"
#include "polygcl/model.hpp"
#include "polygcl/objectives.hpp"

namespace polygcl {

struct AdamConfig {
  double lr = 1e-3;
  double weight_decay = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // false: L2 term added to the gradient before the moment updates.
  // true: decay applied directly to the weights (AdamW).
  bool decoupled_weight_decay = false;
};

template <typename Scalar>
struct AdamStateT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v;
  long long step = 0;
};
using AdamState = AdamStateT<double>;

// One bias-corrected Adam update of `param` in place.
template <typename Derived, typename GradDerived>
void adam_step(Eigen::MatrixBase<Derived>& param, const Eigen::MatrixBase<GradDerived>& grad,
               AdamStateT<typename Derived::Scalar>& state, const AdamConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using std::pow;
  if (state.step == 0) {
    state.m = Matrix::Zero(param.rows(), param.cols());
    state.v = Matrix::Zero(param.rows(), param.cols());
  }
  ++state.step;
  Matrix g = grad;
  if (cfg.decoupled_weight_decay) {
    param *= Scalar(1) - Scalar(cfg.lr * cfg.weight_decay);
  } else if (cfg.weight_decay != 0.0) {
    g += Scalar(cfg.weight_decay) * param;
  }
  state.m = Scalar(cfg.beta1) * state.m + Scalar(1 - cfg.beta1) * g;
  state.v = Scalar(cfg.beta2) * state.v + Scalar(1 - cfg.beta2) * g.cwiseAbs2();
  const Scalar c1 = Scalar(1) - pow(Scalar(cfg.beta1), Scalar(state.step));
  const Scalar c2 = Scalar(1) - pow(Scalar(cfg.beta2), Scalar(state.step));
  param.array() -= Scalar(cfg.lr) * (state.m.array() / c1) /
                   ((state.v.array() / c2).sqrt() + Scalar(cfg.eps));
}

struct TrainConfig {
  int epochs = 200;
  AdamConfig adam;
  std::uint64_t seed = 0;
  Index hidden = kDefaultHidden;
  Index out = kDefaultOut;
  Activation activation = Activation::kSquare;
  LossConfig loss;
  AugmentConfig augment;
  double grad_clip = 0.0;  // max global gradient norm; 0 disables
};

void validate(const TrainConfig& cfg);

struct TrainLog {
  std::vector<double> losses;  // one per epoch, before that epoch's update
  double wall_seconds = 0.0;
};

struct PretrainResult {
  EncoderParams params;
  TrainLog log;
};

// Optional per-epoch observer (epoch, loss).
using EpochCallback = std::function<void(int, double)>;

// Self-supervised pre-training on the full graph. Labels are not an input.
// Throws DivergenceError when a loss or gradient becomes non-finite.
PretrainResult pretrain(const Topology& topology, const Eigen::MatrixXd& features,
                        const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Records one training-step circuit (both views, encoder, loss) for the
// given epoch's views; used by the trainer and by the HE analyzer.
struct StepTape {
  std::unique_ptr<Tape> tape;
  Var w1;
  Var w2;
  Var x1;
  Var x2;
  Var z1;
  Var z2;
  Var loss;
};

StepTape record_step(const ViewPair& views, const EncoderParams& params,
                     const LossConfig& loss, bool checked = true);

}  // namespace polygcl
