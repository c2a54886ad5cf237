#include "polygcl/augment.hpp"

#include <stdexcept>
#include <string>

#include "polygcl/rng.hpp"

namespace polygcl {

void validate(const AugmentConfig& cfg) {
  const std::pair<const char*, double> probs[] = {
      {"augment.edge_drop_1", cfg.edge_drop_1},
      {"augment.edge_drop_2", cfg.edge_drop_2},
      {"augment.feat_mask_1", cfg.feat_mask_1},
      {"augment.feat_mask_2", cfg.feat_mask_2},
  };
  for (const auto& [key, p] : probs) {
    if (!(p >= 0.0 && p < 1.0)) {
      throw std::invalid_argument(std::string(key) + " must be in [0, 1), got " +
                                  std::to_string(p));
    }
  }
}

GraphView make_view(const Topology& topology,
                    const std::shared_ptr<const SparseAdjacency>& adjacency,
                    const Eigen::MatrixXd& features, double edge_drop,
                    double feat_mask, std::uint64_t stream_seed) {
  GraphView view;
  Rng edge_rng(derive_seed(stream_seed, "edges"));
  Rng feat_rng(derive_seed(stream_seed, "features"));

  if (edge_drop > 0.0) {
    Topology kept{topology.num_nodes, {}};
    kept.edges.reserve(topology.edges.size());
    for (const Edge& e : topology.edges) {
      if (uniform01(edge_rng) >= edge_drop) kept.edges.push_back(e);
    }
    view.kept_edges = static_cast<Index>(kept.edges.size());
    view.adjacency = std::make_shared<const SparseAdjacency>(normalize_adjacency<double>(kept));
  } else {
    view.kept_edges = static_cast<Index>(topology.edges.size());
    view.adjacency = adjacency;
  }

  view.features = features;
  if (feat_mask > 0.0) {
    for (Index c = 0; c < features.cols(); ++c) {
      if (uniform01(feat_rng) < feat_mask) view.features.col(c).setZero();
    }
  }
  return view;
}

ViewPair make_views(const Topology& topology,
                    const std::shared_ptr<const SparseAdjacency>& adjacency,
                    const Eigen::MatrixXd& features, const AugmentConfig& cfg,
                    std::uint64_t epoch) {
  validate(cfg);
  const std::uint64_t epoch_seed = derive_seed(derive_seed(cfg.seed, "augment"), epoch);
  return {make_view(topology, adjacency, features, cfg.edge_drop_1, cfg.feat_mask_1,
                    derive_seed(epoch_seed, "view1")),
          make_view(topology, adjacency, features, cfg.edge_drop_2, cfg.feat_mask_2,
                    derive_seed(epoch_seed, "view2"))};
}

}  // namespace polygcl
