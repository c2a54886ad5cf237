#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polygcl/config.hpp"
#include "polygcl/hecheck.hpp"

namespace polygcl {

struct Dataset {
  Graph graph;
  SplitMasks masks;
  IngestStats stats;
};

// Loads per cfg (canonical or raw), applies row normalization if requested,
// and uses embedded masks or a seeded split.
Dataset load_dataset(const ExperimentConfig& cfg);

struct RunResult {
  PretrainResult pretrain;
  EvalReport eval;
  Eigen::MatrixXd embeddings;
  std::string train_log_json;
  std::string eval_report_json;
};

// Pre-train, freeze, probe. When `out_dir` is set, writes train_log.json,
// eval_report.json, checkpoint.bin, embeddings.csv, timing.json and
// config.echo there.
RunResult run_experiment(const Dataset& data, const ExperimentConfig& cfg,
                         const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// JSON renderings; both carry the config echo and are byte-stable for a
// fixed config (wall time lives in timing.json instead).
std::string train_log_json(const TrainLog& log, const ExperimentConfig& cfg);
std::string eval_report_json(const EvalReport& report, const ExperimentConfig& cfg);

struct AblationCell {
  Activation activation = Activation::kSquare;
  LossKind loss = LossKind::kPoly;
  double reference_accuracy = 0.0;  // reference Cora accuracy for this cell
  std::optional<double> accuracy;
  bool finite_losses = false;
  std::string error;

  std::string label() const;
};

inline constexpr double kAblationReference[2][2] = {
    // {grace, poly}
    {0.808, 0.828},  // relu
    {0.812, 0.808},  // square
};

// 2 x 2 grid {relu, square} x {grace, poly} with a shared seed. Failed cells
// record their error and the grid continues.
std::vector<AblationCell> run_ablation(const Dataset& data, const ExperimentConfig& cfg,
                                       const std::optional<std::filesystem::path>& out_dir);
std::string ablation_table(const std::vector<AblationCell>& cells);

struct SweepPoint {
  double lambda = 0.0;
  double accuracy = 0.0;  // NaN on failure
  bool failed = false;
  std::string error;
};

inline const std::vector<double> kDefaultLambdaGrid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};

std::vector<SweepPoint> run_lambda_sweep(const Dataset& data, const ExperimentConfig& cfg,
                                         const std::vector<double>& lambdas,
                                         const std::optional<std::filesystem::path>& out_dir);
// CSV "lambda,accuracy,failed,argmax".
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::optional<std::size_t> sweep_argmax(const std::vector<SweepPoint>& points);

struct HecheckResult {
  Circuit circuit;
  DepthReport report;
  BackwardDepthReport backward;
};

// Records the configured training-step circuit on a dummy ring graph of
// cfg.hecheck_nodes nodes and analyzes it. Structure depends only on the
// configured pipeline, not on the graph size.
HecheckResult run_hecheck(const ExperimentConfig& cfg, std::uint64_t epoch = 0);

// Encoder-only circuit (input X, output Z) for the configured activation.
Circuit encoder_circuit(const ExperimentConfig& cfg);

struct GradCheckSummary {
  std::vector<std::pair<std::string, double>> per_op;  // op name -> max rel err
  double pipeline_max_rel_error = 0.0;
  double max_rel_error = 0.0;
};

// Finite-difference check of every differentiable op on random 3x4 inputs plus
// the configured full pipeline on an 8-node graph.
GradCheckSummary run_grad_check(const ExperimentConfig& cfg);

// Ring graph with chords and deterministic small features, for circuit
// recording and gradient checks.
Graph dummy_graph(Index num_nodes, Index num_features, std::uint64_t seed);

}  // namespace polygcl
