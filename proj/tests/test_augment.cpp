#include <gtest/gtest.h>

#include <cmath>

#include "polygcl/augment.hpp"
#include "support/synthetic.hpp"

using namespace polygcl;

namespace {

struct Base {
  Graph g;
  std::shared_ptr<const SparseAdjacency> adj;
};

Base base_graph(Index nodes = 60, std::uint64_t seed = 3) {
  testutil::SyntheticSpec s;
  s.nodes = nodes;
  s.features = 40;
  s.seed = seed;
  Base b{testutil::synthetic_graph(s), nullptr};
  b.adj = std::make_shared<const SparseAdjacency>(normalize_adjacency(b.g));
  return b;
}

bool same(const SparseAdjacency& a, const SparseAdjacency& b) {
  return Eigen::MatrixXd(a) == Eigen::MatrixXd(b);
}

}  // namespace

TEST(Augment, ZeroProbabilitiesAreNoOps) {
  const Base b = base_graph();
  AugmentConfig cfg{0.0, 0.0, 0.0, 0.0, 7};
  const ViewPair v = make_views(b.g.topology, b.adj, b.g.features, cfg, 5);
  for (const GraphView* view : {&v.first, &v.second}) {
    EXPECT_TRUE(same(*view->adjacency, *b.adj));
    EXPECT_TRUE(view->features == b.g.features);
    EXPECT_EQ(view->kept_edges, static_cast<Index>(b.g.topology.edges.size()));
  }
}

TEST(Augment, HighDropOnTwoNodesLeavesIdentity) {
  const Topology t{2, {{0, 1}}};
  auto adj = std::make_shared<const SparseAdjacency>(normalize_adjacency<double>(t));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 3);
  const GraphView v = make_view(t, adj, x, 0.99, 0.0, 1);
  ASSERT_EQ(v.kept_edges, 0);
  EXPECT_TRUE(Eigen::MatrixXd(*v.adjacency).isIdentity(0.0));
}

TEST(Augment, EdgeDropFrequencyMatchesProbability) {
  const Topology t{2, {{0, 1}}};
  auto adj = std::make_shared<const SparseAdjacency>(normalize_adjacency<double>(t));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 1);
  for (double p : {0.1, 0.3, 0.7}) {
    int dropped = 0;
    const int trials = 10000;
    for (int k = 0; k < trials; ++k) {
      dropped += make_view(t, adj, x, p, 0.0, derive_seed(99, static_cast<std::uint64_t>(k)))
                         .kept_edges == 0;
    }
    EXPECT_NEAR(static_cast<double>(dropped) / trials, p, 0.02) << "p=" << p;
  }
}

TEST(Augment, FeatureMaskZeroesWholeColumnsAtRate) {
  const Base b = base_graph();
  const GraphView v = make_view(b.g.topology, b.adj, Eigen::MatrixXd::Ones(60, 400), 0.0, 0.3, 5);
  Index masked = 0;
  for (Index c = 0; c < v.features.cols(); ++c) {
    const double s = v.features.col(c).sum();
    EXPECT_TRUE(s == 0.0 || s == 60.0) << "column " << c << " partially masked";
    masked += s == 0.0;
  }
  // binomial(400, 0.3): sd ~ 9.2
  EXPECT_NEAR(static_cast<double>(masked), 120.0, 4 * 9.2);
}

TEST(Augment, ViewsSymmetricWithSelfLoops) {
  const Base b = base_graph(80);
  AugmentConfig cfg{0.5, 0.2, 0.3, 0.3, 11};
  const ViewPair v = make_views(b.g.topology, b.adj, b.g.features, cfg, 2);
  for (const GraphView* view : {&v.first, &v.second}) {
    const Eigen::MatrixXd a(*view->adjacency);
    EXPECT_TRUE((a.array() == a.transpose().array()).all());
    for (Index i = 0; i < a.rows(); ++i) EXPECT_GT(a(i, i), 0.0);
    EXPECT_LT(view->kept_edges, static_cast<Index>(b.g.topology.edges.size()));
  }
}

TEST(Augment, DeterministicPerSeedAndEpoch) {
  const Base b = base_graph();
  AugmentConfig cfg{0.3, 0.3, 0.3, 0.3, 21};
  const ViewPair a = make_views(b.g.topology, b.adj, b.g.features, cfg, 4);
  const ViewPair c = make_views(b.g.topology, b.adj, b.g.features, cfg, 4);
  EXPECT_TRUE(same(*a.first.adjacency, *c.first.adjacency));
  EXPECT_TRUE(a.second.features == c.second.features);

  const ViewPair d = make_views(b.g.topology, b.adj, b.g.features, cfg, 5);
  EXPECT_FALSE(same(*a.first.adjacency, *d.first.adjacency) &&
               a.first.features == d.first.features);
  // the two views of one epoch use different streams
  EXPECT_FALSE(same(*a.first.adjacency, *a.second.adjacency) &&
               a.first.features == a.second.features);
}

TEST(Augment, ValidateRejectsOutOfRange) {
  EXPECT_THROW(validate(AugmentConfig{1.0, 0, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(validate(AugmentConfig{0, -0.1, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(validate(AugmentConfig{0, 0, std::nan(""), 0, 0}), std::invalid_argument);
  EXPECT_NO_THROW(validate(AugmentConfig{0, 0.99, 0, 0.5, 0}));
}
