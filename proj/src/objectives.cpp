#include "polygcl/objectives.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "polygcl/errors.hpp"

namespace polygcl {
namespace {

void require_pair(Var z1, Var z2, const char* what) {
  const Shape a = z1.shape();
  const Shape b = z2.shape();
  if (!(a == b)) {
    throw ShapeError(std::string(what) + ": view embeddings differ in shape (" +
                     to_string(a) + " vs " + to_string(b) + ")");
  }
  if (a.rows < 2) {
    throw ShapeError(std::string(what) + ": needs at least two nodes for negative pairs");
  }
}

// Per-anchor -log(e^{pos} / (sum_k e^{between_ik} + sum_{k != i} e^{within_ik})),
// written as log(denominator) - pos, with rows reduced by a ones column.
Var anchor_losses(Var between_logits, Var within_logits, Var ones) {
  Var between = exp(between_logits);
  Var within = exp(within_logits);
  Var denominator = matmul(between, ones) + matmul(within, ones) - diag_of(within);
  return log(denominator) - diag_of(between_logits);
}

}  // namespace

std::string_view loss_kind_name(LossKind k) {
  return k == LossKind::kPoly ? "poly" : "grace";
}

std::optional<LossKind> loss_kind_from_name(std::string_view name) {
  if (name == "poly") return LossKind::kPoly;
  if (name == "grace") return LossKind::kGrace;
  return std::nullopt;
}

void validate(const LossConfig& cfg) {
  if (!(cfg.margin >= 0.0)) throw std::invalid_argument("loss.margin must be >= 0");
  if (!(cfg.lambda >= 0.0)) throw std::invalid_argument("loss.lambda must be >= 0");
  if (!(cfg.temperature > 0.0)) throw std::invalid_argument("loss.temperature must be > 0");
}

Var poly_loss(Var z1, Var z2, double margin, double lambda) {
  require_pair(z1, z2, "poly_loss");
  const double n = static_cast<double>(z1.shape().rows);
  Var similarity = matmul(z1, transpose(z2));
  Var contrastive = off_diagonal_mean(similarity, margin);
  Var regularizer = scale(frobenius_sq(z1) + frobenius_sq(z2), lambda / n);
  return contrastive + regularizer;
}

Var grace_loss(Var z1, Var z2, double temperature) {
  require_pair(z1, z2, "grace_loss");
  if (!(temperature > 0.0)) throw std::invalid_argument("grace_loss: temperature must be > 0");
  Tape& tape = z1.tape();
  const double inv_t = 1.0 / temperature;
  Var ones = tape.constant(Tensor::Ones(z1.shape().rows, 1), "ones");

  Var u = row_l2_normalize(z1);
  Var v = row_l2_normalize(z2);
  Var cross = scale(matmul(u, transpose(v)), inv_t);
  Var within_u = scale(matmul(u, transpose(u)), inv_t);
  Var within_v = scale(matmul(v, transpose(v)), inv_t);

  Var l1 = anchor_losses(cross, within_u, ones);
  Var l2 = anchor_losses(transpose(cross), within_v, ones);
  return scale(mean_all(l1) + mean_all(l2), 0.5);
}

Var contrastive_loss(Var z1, Var z2, const LossConfig& cfg) {
  validate(cfg);
  switch (cfg.kind) {
    case LossKind::kPoly:
      return poly_loss(z1, z2, cfg.margin, cfg.lambda);
    case LossKind::kGrace:
      return grace_loss(z1, z2, cfg.temperature);
  }
  throw std::invalid_argument("unknown loss kind");
}

}  // namespace polygcl
