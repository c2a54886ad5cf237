#include "polygcl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "polygcl/errors.hpp"

namespace polygcl {

DivergenceError::DivergenceError(int epoch, double last_finite_loss)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                         " (last finite loss " + std::to_string(last_finite_loss) + ")"),
      epoch_(epoch),
      last_finite_loss_(last_finite_loss) {}

void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw std::invalid_argument("train.epochs must be >= 0");
  if (!(cfg.adam.lr > 0.0)) throw std::invalid_argument("train.lr must be > 0");
  if (!(cfg.adam.weight_decay >= 0.0)) {
    throw std::invalid_argument("train.weight_decay must be >= 0");
  }
  if (cfg.hidden <= 0 || cfg.out <= 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (!(cfg.grad_clip >= 0.0)) throw std::invalid_argument("train.grad_clip must be >= 0");
  validate(cfg.loss);
  validate(cfg.augment);
}

StepTape record_step(const ViewPair& views, const EncoderParams& params,
                     const LossConfig& loss, bool checked) {
  StepTape s;
  s.tape = std::make_unique<Tape>(checked);
  Tape& t = *s.tape;
  s.w1 = t.parameter(params.w1, "w1");
  s.w2 = t.parameter(params.w2, "w2");
  s.x1 = t.input(views.first.features, Encryption::kEncrypted, "x_view1");
  s.x2 = t.input(views.second.features, Encryption::kEncrypted, "x_view2");
  s.z1 = encode(views.first.adjacency, s.x1, s.w1, s.w2, params.activation);
  s.z2 = encode(views.second.adjacency, s.x2, s.w1, s.w2, params.activation);
  s.loss = contrastive_loss(s.z1, s.z2, loss);
  return s;
}

PretrainResult pretrain(const Topology& topology, const Eigen::MatrixXd& features,
                        const TrainConfig& cfg, const EpochCallback& on_epoch) {
  validate(cfg);
  if (features.rows() != topology.num_nodes) {
    throw ShapeError("feature rows do not match node count");
  }
  const auto start = std::chrono::steady_clock::now();
  PretrainResult result;
  result.params =
      init_params(features.cols(), cfg.hidden, cfg.out, cfg.activation, cfg.seed);
  auto base_adj = std::make_shared<const SparseAdjacency>(normalize_adjacency<double>(topology));

  AdamState state_w1;
  AdamState state_w2;
  double last_finite = std::nan("");
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const ViewPair views = make_views(topology, base_adj, features, cfg.augment,
                                      static_cast<std::uint64_t>(epoch));
    StepTape step;
    try {
      step = record_step(views, result.params, cfg.loss);
    } catch (const NumericError&) {
      throw DivergenceError(epoch, last_finite);
    }
    const double loss = step.tape->value(step.loss)(0, 0);
    if (!std::isfinite(loss)) throw DivergenceError(epoch, last_finite);
    const Gradients grads = step.tape->backward(step.loss);
    Tensor g1 = grads[step.w1];
    Tensor g2 = grads[step.w2];
    if (!g1.allFinite() || !g2.allFinite()) throw DivergenceError(epoch, loss);
    if (cfg.grad_clip > 0.0) {
      const double norm = std::sqrt(g1.squaredNorm() + g2.squaredNorm());
      if (norm > cfg.grad_clip) {
        g1 *= cfg.grad_clip / norm;
        g2 *= cfg.grad_clip / norm;
      }
    }
    adam_step(result.params.w1, g1, state_w1, cfg.adam);
    adam_step(result.params.w2, g2, state_w2, cfg.adam);
    if (!result.params.w1.allFinite() || !result.params.w2.allFinite()) {
      throw DivergenceError(epoch, loss);
    }
    result.log.losses.push_back(loss);
    last_finite = loss;
    if (on_epoch) on_epoch(epoch, loss);
  }
  result.log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace polygcl
