#pragma once

#include <cstdint>
#include <memory>

#include "polygcl/graph.hpp"

namespace polygcl {

struct AugmentConfig {
  double edge_drop_1 = 0.3;
  double edge_drop_2 = 0.3;
  double feat_mask_1 = 0.3;
  double feat_mask_2 = 0.3;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument unless every probability is in [0, 1).
void validate(const AugmentConfig& cfg);

struct GraphView {
  std::shared_ptr<const SparseAdjacency> adjacency;
  Eigen::MatrixXd features;
  Index kept_edges = 0;
};

struct ViewPair {
  GraphView first;
  GraphView second;
};

// Drops each undirected edge with the view's edge probability, renormalizes
// (self-loops always stay), and zeroes whole feature columns with the view's
// mask probability. Views are re-derived from the base graph for every epoch
// and depend only on (cfg.seed, epoch).
ViewPair make_views(const Topology& topology,
                    const std::shared_ptr<const SparseAdjacency>& adjacency,
                    const Eigen::MatrixXd& features, const AugmentConfig& cfg,
                    std::uint64_t epoch);

// Single view with explicit probabilities; `stream` selects the random stream.
GraphView make_view(const Topology& topology,
                    const std::shared_ptr<const SparseAdjacency>& adjacency,
                    const Eigen::MatrixXd& features, double edge_drop,
                    double feat_mask, std::uint64_t stream_seed);

}  // namespace polygcl
