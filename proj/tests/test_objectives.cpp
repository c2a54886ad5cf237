#include <gtest/gtest.h>

#include <cmath>

#include "polygcl/errors.hpp"
#include "polygcl/gradcheck.hpp"
#include "polygcl/objectives.hpp"
#include "polygcl/rng.hpp"
#include "support/oracles.hpp"

using namespace polygcl;
using testutil::grace_oracle;
using testutil::poly_oracle;

namespace {

Tensor random(Index r, Index c, Rng& rng) {
  Tensor m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * uniform01(rng) - 1.0;
  return m;
}

double poly_value(const Tensor& z1, const Tensor& z2, double m, double lambda) {
  Tape t;
  return poly_loss(t.constant(z1), t.constant(z2), m, lambda).value()(0, 0);
}

double grace_value(const Tensor& z1, const Tensor& z2, double tau) {
  Tape t;
  return grace_loss(t.constant(z1), t.constant(z2), tau).value()(0, 0);
}

}  // namespace

TEST(PolyLoss, AllZeroEmbeddingsGiveMarginSquared) {
  for (double m : {0.0, 0.5, 2.0}) {
    EXPECT_DOUBLE_EQ(poly_value(Tensor::Zero(4, 3), Tensor::Zero(4, 3), m, 0.3), m * m);
  }
}

TEST(PolyLoss, TwoNodeHandExample) {
  Tensor z(2, 1);
  z << 1, 0;
  EXPECT_NEAR(poly_value(z, z, 0.5, 0.01), 0.26, 1e-15);
}

TEST(PolyLoss, MatchesScalarLoopOracle) {
  Rng rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + static_cast<Index>(uniform_index(rng, 7));
    const Index d = 1 + static_cast<Index>(uniform_index(rng, 4));
    const Tensor z1 = random(n, d, rng), z2 = random(n, d, rng);
    const double m = uniform01(rng), lambda = uniform01(rng) * 0.1;
    EXPECT_NEAR(poly_value(z1, z2, m, lambda), poly_oracle(z1, z2, m, lambda), 1e-10);
  }
}

TEST(PolyLoss, NonNegative) {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const Tensor z1 = random(5, 3, rng), z2 = random(5, 3, rng);
    EXPECT_GE(poly_value(z1, z2, uniform01(rng), uniform01(rng)), 0.0);
  }
}

TEST(PolyLoss, RotationInvariantWithoutRegularizer) {
  Rng rng(102);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor z1 = random(6, 4, rng), z2 = random(6, 4, rng);
    const Eigen::HouseholderQR<Tensor> qr(random(4, 4, rng));
    const Tensor q = qr.householderQ();
    EXPECT_NEAR(poly_value(z1 * q, z2 * q, 0.5, 0.0), poly_value(z1, z2, 0.5, 0.0), 1e-10);
  }
}

TEST(PolyLoss, StrictlyIncreasingInLambda) {
  Rng rng(103);
  const Tensor z1 = random(5, 3, rng), z2 = random(5, 3, rng);
  double prev = poly_value(z1, z2, 0.5, 0.0);
  for (double lambda : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
    const double v = poly_value(z1, z2, 0.5, lambda);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(PolyLoss, OnlyPolynomialNodes) {
  Tape t;
  Var z1 = t.input(Tensor::Ones(3, 2), Encryption::kEncrypted);
  Var z2 = t.input(Tensor::Ones(3, 2), Encryption::kEncrypted);
  poly_loss(z1, z2, 0.5, 0.01);
  for (const Node& n : t.nodes()) EXPECT_TRUE(n.meta.polynomial) << op_name(n.op);
}

TEST(PolyLoss, GradientMatchesFiniteDifferences) {
  Rng rng(104);
  Tape t;
  Var z1 = t.parameter(random(6, 3, rng));
  Var z2 = t.parameter(random(6, 3, rng));
  const GradCheckReport rep = check_gradients(t, poly_loss(z1, z2, 0.5, 0.05));
  EXPECT_TRUE(rep.passed(1e-5)) << rep.max_rel_error;
}

TEST(PolyLoss, RejectsSingleNodeAndShapeMismatch) {
  Tape t;
  EXPECT_THROW(poly_loss(t.constant(Tensor::Ones(1, 2)), t.constant(Tensor::Ones(1, 2)), 0.5, 0.0),
               ShapeError);
  EXPECT_THROW(poly_loss(t.constant(Tensor::Ones(3, 2)), t.constant(Tensor::Ones(3, 1)), 0.5, 0.0),
               ShapeError);
}

TEST(GraceLoss, IdentityHandExample) {
  const Tensor z = Tensor::Identity(2, 2);
  const double e = std::exp(1.0);
  EXPECT_NEAR(grace_value(z, z, 1.0), -std::log(e / (e + 2.0)), 1e-14);
}

TEST(GraceLoss, MatchesScalarLoopOracle) {
  Rng rng(200);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + static_cast<Index>(uniform_index(rng, 7));
    const Index d = 1 + static_cast<Index>(uniform_index(rng, 4));
    const Tensor z1 = random(n, d, rng), z2 = random(n, d, rng);
    const double tau = 0.2 + uniform01(rng);
    EXPECT_NEAR(grace_value(z1, z2, tau), grace_oracle(z1, z2, tau), 1e-10);
  }
}

TEST(GraceLoss, InvariantToRowRescaling) {
  Rng rng(201);
  const Tensor z1 = random(5, 3, rng), z2 = random(5, 3, rng);
  Tensor scaled = z1;
  for (Index i = 0; i < 5; ++i) scaled.row(i) *= 0.1 + 3.0 * uniform01(rng);
  EXPECT_NEAR(grace_value(scaled, z2, 0.4), grace_value(z1, z2, 0.4), 1e-12);
}

TEST(GraceLoss, MarksNonPolynomialNodes) {
  Tape t;
  Var z1 = t.input(Tensor::Identity(3, 3), Encryption::kEncrypted);
  Var z2 = t.input(Tensor::Identity(3, 3), Encryption::kEncrypted);
  grace_loss(z1, z2, 0.5);
  int exps = 0, norms = 0;
  for (const Node& n : t.nodes()) {
    if (n.op == Op::kExp || n.op == Op::kRowL2Normalize) {
      EXPECT_FALSE(n.meta.polynomial);
    }
    exps += n.op == Op::kExp;
    norms += n.op == Op::kRowL2Normalize;
  }
  EXPECT_GT(exps, 0);
  EXPECT_EQ(norms, 2);
}

TEST(GraceLoss, GradientMatchesFiniteDifferences) {
  Rng rng(202);
  Tape t;
  Var z1 = t.parameter(random(5, 3, rng));
  Var z2 = t.parameter(random(5, 3, rng));
  const GradCheckReport rep = check_gradients(t, grace_loss(z1, z2, 0.5));
  EXPECT_TRUE(rep.passed(1e-5)) << rep.max_rel_error;
}

TEST(GraceLoss, ZeroRowRejectedInCheckedMode) {
  Tape t;
  Tensor z = Tensor::Identity(3, 3);
  z.row(1).setZero();
  EXPECT_THROW(grace_loss(t.constant(z), t.constant(Tensor::Identity(3, 3)), 0.5), NumericError);
}

TEST(LossConfig, ValidationAndDispatch) {
  EXPECT_THROW(validate(LossConfig{LossKind::kPoly, -0.1, 0.0, 0.4}), std::invalid_argument);
  EXPECT_THROW(validate(LossConfig{LossKind::kPoly, 0.5, -1.0, 0.4}), std::invalid_argument);
  EXPECT_THROW(validate(LossConfig{LossKind::kGrace, 0.5, 0.0, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(validate(LossConfig{}));

  Rng rng(5);
  const Tensor z1 = random(4, 2, rng), z2 = random(4, 2, rng);
  Tape t;
  LossConfig cfg;
  EXPECT_EQ(contrastive_loss(t.constant(z1), t.constant(z2), cfg).value()(0, 0),
            poly_value(z1, z2, cfg.margin, cfg.lambda));
  cfg.kind = LossKind::kGrace;
  EXPECT_EQ(contrastive_loss(t.constant(z1), t.constant(z2), cfg).value()(0, 0),
            grace_value(z1, z2, cfg.temperature));
  EXPECT_EQ(loss_kind_from_name("grace"), LossKind::kGrace);
  EXPECT_EQ(loss_kind_name(LossKind::kPoly), "poly");
}
