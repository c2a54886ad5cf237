#pragma once

#include <optional>
#include <string_view>

#include "polygcl/tape.hpp"

namespace polygcl {

enum class LossKind { kPoly, kGrace };

std::string_view loss_kind_name(LossKind k);
std::optional<LossKind> loss_kind_from_name(std::string_view name);

struct LossConfig {
  LossKind kind = LossKind::kPoly;
  double margin = 0.5;
  double lambda = 1e-2;
  double temperature = 0.4;  // grace only
};

void validate(const LossConfig& cfg);

// Polynomial margin objective on S = Z1 Z2^T:
//   mean_{i != j} (S_ij - S_ii + m)^2 + lambda (|Z1|_F^2 + |Z2|_F^2) / N
// Uses only additions and multiplications. Throws ShapeError if N < 2.
Var poly_loss(Var z1, Var z2, double margin, double lambda);

// Symmetric NT-Xent on row-normalized embeddings with inter- and intra-view
// negatives at temperature tau, averaged over both anchor views.
Var grace_loss(Var z1, Var z2, double temperature);

Var contrastive_loss(Var z1, Var z2, const LossConfig& cfg);

}  // namespace polygcl
