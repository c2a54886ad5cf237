#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "polygcl/errors.hpp"
#include "polygcl/graph.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

using namespace polygcl;
using polygcl::testutil::TempDir;

namespace {

Eigen::MatrixXd dense(const SparseAdjacency& a) { return Eigen::MatrixXd(a); }

Topology path3() { return {3, {{0, 1}, {1, 2}}}; }

Graph toy_graph() {
  Graph g;
  g.topology = {4, {{0, 1}, {1, 2}, {2, 3}}};
  g.features.resize(4, 3);
  g.features << 1, 0, 0.5, 0, 1, 0, 0.25, 0, 1, 1, 1, 0;
  g.labels = {0, 1, 1, 0};
  g.num_classes = 2;
  return g;
}

}  // namespace

TEST(NormalizeAdjacency, SingleNodeIsSelfLoop) {
  const Eigen::MatrixXd a = dense(normalize_adjacency<double>(Topology{1, {}}));
  ASSERT_EQ(a.rows(), 1);
  EXPECT_DOUBLE_EQ(a(0, 0), 1.0);
}

TEST(NormalizeAdjacency, TwoNodesAllHalf) {
  const Eigen::MatrixXd a = dense(normalize_adjacency<double>(Topology{2, {{0, 1}}}));
  EXPECT_TRUE(a.isApprox(Eigen::MatrixXd::Constant(2, 2, 0.5), 1e-15));
}

TEST(NormalizeAdjacency, PathGraphHandValues) {
  // degrees of A + I are {2, 3, 2}
  const Eigen::MatrixXd a = dense(normalize_adjacency<double>(path3()));
  EXPECT_NEAR(a(1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a(0, 1), 1.0 / std::sqrt(6.0), 1e-15);
  EXPECT_NEAR(a(0, 0), 0.5, 1e-15);
  EXPECT_EQ(a(0, 2), 0.0);
}

TEST(NormalizeAdjacency, SymmetricPositiveAndContractive) {
  testutil::SyntheticSpec s;
  s.nodes = 120;
  s.seed = 9;
  const Graph g = synthetic_graph(s);
  const SparseAdjacency a = normalize_adjacency(g);
  const Eigen::MatrixXd d = dense(a);
  EXPECT_TRUE((d.array() == d.transpose().array()).all()) << "not bitwise symmetric";
  for (int k = 0; k < a.outerSize(); ++k) {
    bool has_diag = false;
    for (SparseAdjacency::InnerIterator it(a, k); it; ++it) {
      EXPECT_GT(it.value(), 0.0);
      has_diag = has_diag || it.col() == k;
    }
    EXPECT_TRUE(has_diag) << "row " << k;
  }
  // Row sums can exceed 1 for nodes next to hubs; the spectral radius cannot.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d);
  EXPECT_LE(eig.eigenvalues().cwiseAbs().maxCoeff(), 1.0 + 1e-12);
  EXPECT_GT(d.rowwise().sum().minCoeff(), 0.0);
}

TEST(NormalizeAdjacency, FloatInstantiationMatchesDouble) {
  const auto af = normalize_adjacency<float>(path3());
  const Eigen::MatrixXd ad = dense(normalize_adjacency<double>(path3()));
  EXPECT_TRUE(Eigen::MatrixXf(af).cast<double>().isApprox(ad, 1e-6));
}

TEST(CanonicalEdges, SortsOrientsAndCounts) {
  IngestStats st;
  const auto e = canonical_edges({{2, 1}, {1, 2}, {0, 1}, {3, 3}, {1, 0}}, &st);
  const std::vector<Edge> expected = {{0, 1}, {1, 2}};
  EXPECT_EQ(e, expected);
  EXPECT_EQ(st.self_loops, 1);
  EXPECT_EQ(st.duplicates, 2);
}

TEST(LoadContentCites, ToyFile) {
  TempDir dir;
  const auto content = dir.write("t.content",
                                 "p1\t1\t0\tNeural\n"
                                 "p2\t0\t1\tTheory\n"
                                 "p3\t1\t1\tNeural\n");
  const auto cites = dir.write("t.cites", "p1\tp2\np3\tp2\n");
  IngestStats st;
  const Graph g = load_content_cites(content, cites, &st);
  EXPECT_EQ(g.num_nodes(), 3);
  EXPECT_EQ(g.num_features(), 2);
  EXPECT_EQ(g.num_classes, 2);
  EXPECT_EQ(g.topology.edges.size(), 2u);
  // classes are numbered in sorted name order
  EXPECT_EQ(g.labels, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(st.dropped_unknown, 0);
}

TEST(LoadContentCites, UnknownIdDroppedAndCounted) {
  TempDir dir;
  const auto content = dir.write("t.content", "a\t1\tX\nb\t0\tY\n");
  const auto cites = dir.write("t.cites", "a\tb\na\tghost\n");
  IngestStats st;
  const Graph g = load_content_cites(content, cites, &st);
  EXPECT_EQ(g.topology.edges.size(), 1u);
  EXPECT_EQ(st.dropped_unknown, 1);
}

TEST(LoadContentCites, MalformedRowNamesLine) {
  TempDir dir;
  const auto content = dir.write("t.content", "a\t1\t0\tX\nb\t1\tzz\tY\n");
  const auto cites = dir.write("t.cites", "");
  try {
    load_content_cites(content, cites);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(LoadContentCites, EmptyAndMissingFiles) {
  TempDir dir;
  const auto content = dir.write("t.content", "\n");
  const auto cites = dir.write("t.cites", "");
  EXPECT_THROW(load_content_cites(content, cites), ParseError);
  EXPECT_THROW(load_content_cites(dir / "absent.content", cites), ParseError);
}

TEST(Canonical, MinimalSingleNode) {
  TempDir dir;
  const auto p = dir.write("g.json",
                           R"({"num_nodes":1,"num_classes":1,"edges":[],)"
                           R"("features":[[0.5]],"labels":[0]})");
  const CanonicalGraph c = load_canonical(p);
  EXPECT_EQ(c.graph.num_nodes(), 1);
  EXPECT_FALSE(c.masks.has_value());
}

TEST(Canonical, LabelOutOfRangeRejected) {
  TempDir dir;
  const auto p = dir.write("g.json",
                           R"({"num_nodes":2,"num_classes":1,"edges":[[0,1]],)"
                           R"("features":[[1],[2]],"labels":[0,1]})");
  EXPECT_THROW(load_canonical(p), ParseError);
}

TEST(Canonical, SchemaViolationsRejected) {
  TempDir dir;
  EXPECT_THROW(load_canonical(dir.write("a.json", R"({"num_nodes":2})")), ParseError);
  EXPECT_THROW(load_canonical(dir.write("b.json", "not json")), ParseError);
  EXPECT_THROW(load_canonical(dir.write("c.json",
                                        R"({"num_nodes":2,"num_classes":1,"edges":[[0,2]],)"
                                        R"("features":[[1],[2]],"labels":[0,0]})")),
               ParseError);
}

TEST(Canonical, IngestSaveLoadRoundTrip) {
  TempDir dir;
  testutil::SyntheticSpec s;
  s.nodes = 80;
  s.features = 30;
  s.seed = 4;
  const Graph original = synthetic_graph(s);
  testutil::write_content_cites(original, dir.path());
  const Graph ingested =
      load_content_cites(dir / "synthetic.content", dir / "synthetic.cites");

  SplitMasks masks{{0, 5}, {1}, {2, 3}};
  save_canonical(dir / "g.json", ingested, masks);
  const CanonicalGraph back = load_canonical(dir / "g.json");
  EXPECT_EQ(back.graph.num_nodes(), ingested.num_nodes());
  EXPECT_EQ(back.graph.topology.edges, ingested.topology.edges);
  EXPECT_TRUE((back.graph.features.array() == ingested.features.array()).all());
  EXPECT_EQ(back.graph.labels, ingested.labels);
  EXPECT_EQ(back.graph.num_classes, ingested.num_classes);
  ASSERT_TRUE(back.masks.has_value());
  EXPECT_EQ(*back.masks, masks);

  // the ingest path preserves the generator's structure exactly
  EXPECT_EQ(ingested.topology.edges, original.topology.edges);
  EXPECT_TRUE((ingested.features.array() == original.features.array()).all());

  // idempotent: saving again yields the same bytes
  save_canonical(dir / "g2.json", back.graph, back.masks);
  EXPECT_EQ(testutil::read_file(dir / "g.json"), testutil::read_file(dir / "g2.json"));
}

TEST(Canonical, NonIntegerFeaturesRoundTripExactly) {
  TempDir dir;
  Graph g = toy_graph();
  g.features(2, 1) = 0.1 + 0.2;
  g.features(3, 2) = 1e-300;
  save_canonical(dir / "g.json", g);
  const Graph back = load_canonical(dir / "g.json").graph;
  EXPECT_TRUE((back.features.array() == g.features.array()).all());
}

TEST(Split, SizesDisjointAndDeterministic) {
  testutil::SyntheticSpec s;
  s.nodes = 1700;
  s.features = 20;
  s.classes = 7;
  const Graph g = synthetic_graph(s);
  const SplitMasks a = make_split(g, 0);
  const SplitMasks b = make_split(g, 0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.train.size(), 140u);
  EXPECT_EQ(a.val.size(), 500u);
  EXPECT_EQ(a.test.size(), 1000u);
  std::vector<int> per_class(7, 0);
  for (Index i : a.train) ++per_class[static_cast<std::size_t>(g.labels[static_cast<std::size_t>(i)])];
  for (int c : per_class) EXPECT_EQ(c, 20);

  std::set<Index> all;
  for (const auto* m : {&a.train, &a.val, &a.test}) all.insert(m->begin(), m->end());
  EXPECT_EQ(all.size(), a.train.size() + a.val.size() + a.test.size());
  EXPECT_NO_THROW(validate(a, g.num_nodes()));

  EXPECT_NE(make_split(g, 1).test, a.test);
}

TEST(Split, TooSmallGraphRejected) {
  testutil::SyntheticSpec s;
  s.nodes = 10;
  s.features = 5;
  s.classes = 2;
  const Graph g = synthetic_graph(s);
  try {
    make_split(g, 0);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("class 0"), std::string::npos) << e.what();
  }
}

TEST(RowNormalize, RowsSumToOneAndZeroRowsStay) {
  Eigen::MatrixXd x(3, 3);
  x << 1, 1, 2, 0, 0, 0, 0, 3, 0;
  row_normalize(x);
  EXPECT_NEAR(x.row(0).sum(), 1.0, 1e-15);
  EXPECT_EQ(x.row(1).sum(), 0.0);
  EXPECT_EQ(x(2, 1), 1.0);
}
