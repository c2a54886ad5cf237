#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polygcl {

using Index = std::int64_t;

// Undirected edge stored as (min, max).
struct Edge {
  Index u = 0;
  Index v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Structure only. Training code receives this and the feature matrix, never
// the labels.
struct Topology {
  Index num_nodes = 0;
  std::vector<Edge> edges;  // sorted, deduplicated, u < v
};

struct Graph {
  Topology topology;
  Eigen::MatrixXd features;  // N x F
  std::vector<int> labels;   // N entries in [0, num_classes)
  int num_classes = 0;

  Index num_nodes() const { return topology.num_nodes; }
  Index num_features() const { return features.cols(); }
};

// Compressed-row normalized adjacency; Eigen's RowMajor compressed storage is
// exactly (row offsets, column indices, values).
template <typename Scalar>
using SparseAdjacencyT = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;
using SparseAdjacency = SparseAdjacencyT<double>;

struct SplitMasks {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;

  friend bool operator==(const SplitMasks&, const SplitMasks&) = default;
};

struct SplitSizes {
  Index train_per_class = 20;
  Index val = 500;
  Index test = 1000;
};

struct IngestStats {
  Index dropped_unknown = 0;  // cites rows naming ids absent from content
  Index self_loops = 0;
  Index duplicates = 0;       // repeated or reversed edges
};

struct CanonicalGraph {
  Graph graph;
  std::optional<SplitMasks> masks;
};

// Throws ParseError on invalid structure (index out of range, label out of
// range, row count mismatch, self-loop).
void validate(const Graph& g);

// Sorts, orients (u < v) and deduplicates. Self-loops are removed.
std::vector<Edge> canonical_edges(std::vector<Edge> edges,
                                  IngestStats* stats = nullptr);

// Tab-separated citation format: content rows "id f1..fF label", cites rows
// "cited citing". Nodes are numbered in content order; classes in sorted name
// order.
Graph load_content_cites(const std::filesystem::path& content_path,
                         const std::filesystem::path& cites_path,
                         IngestStats* stats = nullptr);

CanonicalGraph load_canonical(const std::filesystem::path& path);
void save_canonical(const std::filesystem::path& path, const Graph& g,
                    const std::optional<SplitMasks>& masks = std::nullopt);

// D^{-1/2} (A + I) D^{-1/2}, D the degree of A + I.
template <typename Scalar = double>
SparseAdjacencyT<Scalar> normalize_adjacency(const Topology& topology) {
  const Index n = topology.num_nodes;
  std::vector<Scalar> degree(static_cast<std::size_t>(n), Scalar(1));
  for (const Edge& e : topology.edges) {
    degree[static_cast<std::size_t>(e.u)] += Scalar(1);
    degree[static_cast<std::size_t>(e.v)] += Scalar(1);
  }
  std::vector<Eigen::Triplet<Scalar, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) + 2 * topology.edges.size());
  auto weight = [&](Index a, Index b) {
    using std::sqrt;
    // The product is commutative in IEEE arithmetic, so (a,b) and (b,a) get
    // identical values.
    return Scalar(1) / sqrt(degree[static_cast<std::size_t>(a)] *
                            degree[static_cast<std::size_t>(b)]);
  };
  for (Index i = 0; i < n; ++i) {
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), weight(i, i));
  }
  for (const Edge& e : topology.edges) {
    const Scalar w = weight(e.u, e.v);
    triplets.emplace_back(static_cast<int>(e.u), static_cast<int>(e.v), w);
    triplets.emplace_back(static_cast<int>(e.v), static_cast<int>(e.u), w);
  }
  SparseAdjacencyT<Scalar> adj(n, n);
  adj.setFromTriplets(triplets.begin(), triplets.end());
  adj.makeCompressed();
  return adj;
}

inline SparseAdjacency normalize_adjacency(const Graph& g) {
  return normalize_adjacency<double>(g.topology);
}

// Scales each nonzero feature row to unit L1 norm.
template <typename Derived>
void row_normalize(Eigen::MatrixBase<Derived>& features) {
  for (Index r = 0; r < features.rows(); ++r) {
    const auto sum = features.row(r).cwiseAbs().sum();
    if (sum > 0) features.row(r) /= sum;
  }
}

// Planetoid-style split: shuffle all nodes with `seed`, take the first
// `train_per_class` of each class for training, then `val` and `test` nodes
// from the remainder in shuffled order.
SplitMasks make_split(const Graph& g, std::uint64_t seed,
                      const SplitSizes& sizes = {});

void validate(const SplitMasks& masks, Index num_nodes);

}  // namespace polygcl
