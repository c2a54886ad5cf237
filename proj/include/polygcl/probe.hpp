#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "polygcl/graph.hpp"
#include "polygcl/model.hpp"

namespace polygcl {

struct ProbeConfig {
  double lr = 0.01;
  int epochs = 300;
  double l2 = 1e-4;
  bool standardize = false;
  std::uint64_t seed = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // NaN for classes absent from test
  Index train_size = 0;
  Index test_size = 0;
  Index correct = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Multinomial logistic regression (weights D x C plus bias) trained with
// full-batch Adam on the train rows of frozen embeddings; accuracy on test.
// `initial_weights` overrides the seeded Glorot init (D x C).
EvalReport linear_probe(const Eigen::MatrixXd& embeddings, std::span<const int> labels,
                        int num_classes, const SplitMasks& masks, const ProbeConfig& cfg,
                        const std::optional<Eigen::MatrixXd>& initial_weights = std::nullopt);

// Encodes the unaugmented graph with frozen params, then probes.
EvalReport evaluate_pipeline(const Graph& g, const EncoderParams& params,
                             const SplitMasks& masks, const ProbeConfig& cfg,
                             Eigen::MatrixXd* embeddings_out = nullptr);

// CSV "node_id,label,z_0,...,z_{D-1}" with shortest round-trip doubles.
void export_embeddings(const std::filesystem::path& path, const Eigen::MatrixXd& embeddings,
                       std::span<const int> labels);

struct EmbeddingTable {
  std::vector<int> labels;
  Eigen::MatrixXd embeddings;
};
EmbeddingTable read_embeddings(const std::filesystem::path& path);

}  // namespace polygcl
