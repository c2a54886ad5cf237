#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <numeric>

#include "polygcl/errors.hpp"
#include "polygcl/probe.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

using namespace polygcl;
using testutil::TempDir;

namespace {

SplitMasks alternating_masks(Index n) {
  SplitMasks m;
  for (Index i = 0; i < n; ++i) (i % 2 ? m.test : m.train).push_back(i);
  return m;
}

}  // namespace

TEST(LinearProbe, OneHotEmbeddingsAreSeparable) {
  const int classes = 4;
  const Index n = 40;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, classes);
  std::vector<int> labels(n);
  for (Index i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>((i / 2) % classes);
    z(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  }
  const EvalReport r = linear_probe(z, labels, classes, alternating_masks(n), ProbeConfig{});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.correct, 20);
  EXPECT_EQ(r.train_size, 20);
  EXPECT_EQ(r.test_size, 20);
  for (double a : r.per_class_accuracy) EXPECT_EQ(a, 1.0);
}

TEST(LinearProbe, ShuffledLabelsGiveChanceAccuracy) {
  const int classes = 7;
  const Index n = 1400;
  Rng rng(8);
  Eigen::MatrixXd z(n, 16);
  for (Index i = 0; i < z.size(); ++i) z.data()[i] = uniform01(rng) - 0.5;
  double total = 0.0;
  const int seeds = 5;
  for (int s = 0; s < seeds; ++s) {
    std::vector<int> labels(n);
    for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % classes);
    Rng shuffle_rng(derive_seed(100, static_cast<std::uint64_t>(s)));
    shuffle(labels, shuffle_rng);
    ProbeConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(s);
    total += linear_probe(z, labels, classes, alternating_masks(n), cfg).accuracy;
  }
  EXPECT_NEAR(total / seeds, 1.0 / classes, 0.05);
}

TEST(LinearProbe, DeterministicPerSeed) {
  Rng rng(9);
  Eigen::MatrixXd z(60, 5);
  for (Index i = 0; i < z.size(); ++i) z.data()[i] = uniform01(rng);
  std::vector<int> labels(60);
  for (int i = 0; i < 60; ++i) labels[static_cast<std::size_t>(i)] = i % 3;
  ProbeConfig cfg;
  cfg.seed = 4;
  const EvalReport a = linear_probe(z, labels, 3, alternating_masks(60), cfg);
  const EvalReport b = linear_probe(z, labels, 3, alternating_masks(60), cfg);
  EXPECT_EQ(a, b);
}

TEST(LinearProbe, InvariantToEmbeddingDimensionPermutation) {
  testutil::SyntheticSpec s;
  s.nodes = 200;
  s.features = 12;
  const Graph g = testutil::synthetic_graph(s);
  const Eigen::MatrixXd& z = g.features;
  Rng rng(1);
  Eigen::MatrixXd w0(12, s.classes);
  for (Index i = 0; i < w0.size(); ++i) w0.data()[i] = uniform01(rng) - 0.5;
  std::vector<Index> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(perm, rng);
  Eigen::MatrixXd zp(z.rows(), 12), wp(12, s.classes);
  for (Index k = 0; k < 12; ++k) {
    zp.col(k) = z.col(perm[static_cast<std::size_t>(k)]);
    wp.row(k) = w0.row(perm[static_cast<std::size_t>(k)]);
  }
  const auto masks = alternating_masks(200);
  const EvalReport a = linear_probe(z, g.labels, s.classes, masks, ProbeConfig{}, w0);
  const EvalReport b = linear_probe(zp, g.labels, s.classes, masks, ProbeConfig{}, wp);
  EXPECT_EQ(a.accuracy, b.accuracy);
}

TEST(LinearProbe, AbsentClassReportedAsNaN) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(4, 3);
  std::vector<int> labels = {0, 1, 0, 1};
  SplitMasks m{{0, 1}, {}, {2, 3}};
  const EvalReport r = linear_probe(z, labels, 3, m, ProbeConfig{});
  EXPECT_TRUE(std::isnan(r.per_class_accuracy[2]));
}

TEST(LinearProbe, StandardizeHandlesTinyScales) {
  const int classes = 3;
  const Index n = 90;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, classes);
  std::vector<int> labels(n);
  for (Index i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>(i % classes);
    z(i, labels[static_cast<std::size_t>(i)]) = 1e-7;
  }
  ProbeConfig cfg;
  cfg.standardize = true;
  EXPECT_EQ(linear_probe(z, labels, classes, alternating_masks(n), cfg).accuracy, 1.0);
}

TEST(LinearProbe, Errors) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(4, 2);
  std::vector<int> labels = {0, 1, 0, 1};
  EXPECT_THROW(linear_probe(z, labels, 2, SplitMasks{{0, 1}, {}, {}}, ProbeConfig{}),
               std::invalid_argument);
  EXPECT_THROW(linear_probe(z, labels, 2, SplitMasks{{}, {}, {0}}, ProbeConfig{}),
               std::invalid_argument);
  EXPECT_THROW(linear_probe(z, std::vector<int>{0, 1}, 2, SplitMasks{{0}, {}, {1}}, ProbeConfig{}),
               ShapeError);
}

TEST(EvaluatePipeline, DeterministicAndExportsEmbeddings) {
  testutil::SyntheticSpec s;
  s.nodes = 100;
  s.features = 20;
  const Graph g = testutil::synthetic_graph(s);
  const EncoderParams p = init_params(20, 8, 6, Activation::kSquare, 1);
  Eigen::MatrixXd z1, z2;
  const EvalReport a = evaluate_pipeline(g, p, alternating_masks(100), ProbeConfig{}, &z1);
  const EvalReport b = evaluate_pipeline(g, p, alternating_masks(100), ProbeConfig{}, &z2);
  EXPECT_EQ(a.correct, b.correct);
  EXPECT_EQ(a.accuracy, b.accuracy);
  ASSERT_EQ(a.per_class_accuracy.size(), b.per_class_accuracy.size());
  for (std::size_t c = 0; c < a.per_class_accuracy.size(); ++c) {
    const double x = a.per_class_accuracy[c], y = b.per_class_accuracy[c];
    EXPECT_TRUE(x == y || (std::isnan(x) && std::isnan(y))) << "class " << c;
  }
  EXPECT_EQ(z1.rows(), 100);
  EXPECT_EQ(z1.cols(), 6);
  EXPECT_TRUE(z1 == z2);
  EXPECT_TRUE(z1 == encode(normalize_adjacency(g), g.features, p));
}

TEST(Embeddings, CsvLayoutAndExactRoundTrip) {
  TempDir dir;
  Eigen::MatrixXd z(2, 2);
  z << 0.1 + 0.2, -1e-300, 3.0, 1.0 / 3.0;
  std::vector<int> labels = {4, 0};
  export_embeddings(dir / "e.csv", z, labels);
  const std::string text = testutil::read_file(dir / "e.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "node_id,label,z_0,z_1");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const EmbeddingTable t = read_embeddings(dir / "e.csv");
  EXPECT_EQ(t.labels, labels);
  EXPECT_TRUE((t.embeddings.array() == z.array()).all());
}

TEST(Embeddings, RandomValuesRoundTripBitwise) {
  TempDir dir;
  Rng rng(77);
  Eigen::MatrixXd z(50, 7);
  for (Index i = 0; i < z.size(); ++i) z.data()[i] = std::ldexp(uniform01(rng) - 0.5, static_cast<int>(uniform_index(rng, 200)) - 100);
  std::vector<int> labels(50, 1);
  export_embeddings(dir / "e.csv", z, labels);
  EXPECT_TRUE((read_embeddings(dir / "e.csv").embeddings.array() == z.array()).all());
}
