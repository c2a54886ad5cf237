#include "polygcl/experiment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "polygcl/errors.hpp"
#include "polygcl/gradcheck.hpp"

namespace polygcl {
namespace {

using nlohmann::ordered_json;

ordered_json echo_json(const ExperimentConfig& cfg) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : config_echo(cfg)) j[k] = v;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string cell_dir_name(Activation a, LossKind l) {
  return std::string(activation_name(a)) + "_" + std::string(loss_kind_name(l));
}

Tensor random_matrix(Index rows, Index cols, Rng& rng, double lo, double hi) {
  Tensor m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = lo + (hi - lo) * uniform01(rng);
  }
  return m;
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& cfg) {
  Dataset data;
  std::optional<SplitMasks> masks;
  if (cfg.data_format == DataFormat::kCanonical) {
    CanonicalGraph c = load_canonical(cfg.data_path);
    data.graph = std::move(c.graph);
    masks = std::move(c.masks);
  } else {
    data.graph = load_content_cites(cfg.content_path, cfg.cites_path, &data.stats);
  }
  if (cfg.row_normalize) row_normalize(data.graph.features);
  data.masks = masks ? std::move(*masks) : make_split(data.graph, cfg.split_seed);
  return data;
}

std::string train_log_json(const TrainLog& log, const ExperimentConfig& cfg) {
  ordered_json j;
  j["config"] = echo_json(cfg);
  j["epochs"] = ordered_json::array();
  for (std::size_t e = 0; e < log.losses.size(); ++e) {
    j["epochs"].push_back({{"epoch", e}, {"loss", log.losses[e]}});
  }
  return j.dump(2) + "\n";
}

std::string eval_report_json(const EvalReport& report, const ExperimentConfig& cfg) {
  ordered_json j;
  j["config"] = echo_json(cfg);
  j["accuracy"] = report.accuracy;
  j["correct"] = report.correct;
  j["train_size"] = report.train_size;
  j["test_size"] = report.test_size;
  ordered_json per_class = ordered_json::array();
  for (const double a : report.per_class_accuracy) {
    per_class.push_back(std::isnan(a) ? ordered_json() : ordered_json(a));
  }
  j["per_class_accuracy"] = std::move(per_class);
  return j.dump(2) + "\n";
}

RunResult run_experiment(const Dataset& data, const ExperimentConfig& config,
                         const std::optional<std::filesystem::path>& out_dir) {
  ExperimentConfig cfg = config;
  propagate_seed(cfg);
  RunResult r;
  r.pretrain = pretrain(data.graph.topology, data.graph.features, cfg.train);
  r.eval = evaluate_pipeline(data.graph, r.pretrain.params, data.masks, cfg.probe, &r.embeddings);
  r.train_log_json = train_log_json(r.pretrain.log, cfg);
  r.eval_report_json = eval_report_json(r.eval, cfg);
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_text(*out_dir / "train_log.json", r.train_log_json);
    write_text(*out_dir / "eval_report.json", r.eval_report_json);
    write_text(*out_dir / "config.echo", config_echo_text(cfg));
    ordered_json timing;
    timing["pretrain_wall_seconds"] = r.pretrain.log.wall_seconds;
    write_text(*out_dir / "timing.json", timing.dump(2) + "\n");
    save_checkpoint(*out_dir / "checkpoint.bin", r.pretrain.params);
    export_embeddings(*out_dir / "embeddings.csv", r.embeddings, data.graph.labels);
  }
  return r;
}

std::string AblationCell::label() const {
  return std::string(activation == Activation::kRelu ? "GCN(relu)" : "PolyGCN(square)") + " + " +
         (loss == LossKind::kGrace ? "grace loss" : "poly loss");
}

std::vector<AblationCell> run_ablation(const Dataset& data, const ExperimentConfig& cfg,
                                       const std::optional<std::filesystem::path>& out_dir) {
  std::vector<AblationCell> cells;
  const Activation acts[] = {Activation::kRelu, Activation::kSquare};
  const LossKind losses[] = {LossKind::kGrace, LossKind::kPoly};
  for (int a = 0; a < 2; ++a) {
    for (int l = 0; l < 2; ++l) {
      AblationCell cell;
      cell.activation = acts[a];
      cell.loss = losses[l];
      cell.reference_accuracy = kAblationReference[a][l];
      ExperimentConfig cell_cfg = cfg;
      cell_cfg.train.activation = cell.activation;
      cell_cfg.train.loss.kind = cell.loss;
      try {
        std::optional<std::filesystem::path> dir;
        if (out_dir) dir = *out_dir / cell_dir_name(cell.activation, cell.loss);
        const RunResult r = run_experiment(data, cell_cfg, dir);
        cell.accuracy = r.eval.accuracy;
        cell.finite_losses = true;
        for (const double x : r.pretrain.log.losses) cell.finite_losses = cell.finite_losses && std::isfinite(x);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::string csv = "activation,loss,accuracy,reference,delta,error\n";
    for (const AblationCell& c : cells) {
      std::ostringstream row;
      row << activation_name(c.activation) << ',' << loss_kind_name(c.loss) << ',';
      if (c.accuracy) {
        row << *c.accuracy << ',' << c.reference_accuracy << ','
            << (*c.accuracy - c.reference_accuracy);
      } else {
        row << "nan," << c.reference_accuracy << ",nan";
      }
      row << ',' << '"' << c.error << '"' << '\n';
      csv += row.str();
    }
    write_text(*out_dir / "ablation.csv", csv);
    write_text(*out_dir / "config.echo", config_echo_text(cfg));
  }
  return cells;
}

std::string ablation_table(const std::vector<AblationCell>& cells) {
  std::ostringstream out;
  out << "combination                     accuracy  reference  delta\n";
  for (const AblationCell& c : cells) {
    std::string label = c.label();
    label.resize(32, ' ');
    out << label;
    char buf[96];
    if (c.accuracy) {
      std::snprintf(buf, sizeof buf, "%7.2f%%  %8.2f%%  %+6.2f", 100 * *c.accuracy,
                    100 * c.reference_accuracy, 100 * (*c.accuracy - c.reference_accuracy));
    } else {
      std::snprintf(buf, sizeof buf, "  failed  %8.2f%%     -- (%s)", 100 * c.reference_accuracy,
                    c.error.c_str());
    }
    out << buf << '\n';
  }
  return out.str();
}

std::vector<SweepPoint> run_lambda_sweep(const Dataset& data, const ExperimentConfig& cfg,
                                         const std::vector<double>& lambdas,
                                         const std::optional<std::filesystem::path>& out_dir) {
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    SweepPoint p;
    p.lambda = lambdas[i];
    ExperimentConfig point_cfg = cfg;
    point_cfg.train.loss.kind = LossKind::kPoly;
    point_cfg.train.loss.lambda = p.lambda;
    try {
      std::optional<std::filesystem::path> dir;
      if (out_dir) dir = *out_dir / ("lambda_" + std::to_string(i));
      p.accuracy = run_experiment(data, point_cfg, dir).eval.accuracy;
    } catch (const std::exception& e) {
      p.failed = true;
      p.accuracy = std::numeric_limits<double>::quiet_NaN();
      p.error = e.what();
    }
    points.push_back(std::move(p));
  }
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_text(*out_dir / "sweep_lambda.csv", sweep_csv(points));
    write_text(*out_dir / "config.echo", config_echo_text(cfg));
  }
  return points;
}

std::optional<std::size_t> sweep_argmax(const std::vector<SweepPoint>& points) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].failed) continue;
    if (!best || points[i].accuracy > points[*best].accuracy) best = i;
  }
  return best;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  const auto best = sweep_argmax(points);
  std::string out = "lambda,accuracy,failed,argmax\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%g,%s,%d,%d\n", points[i].lambda,
                  points[i].failed ? "nan" : std::to_string(points[i].accuracy).c_str(),
                  points[i].failed ? 1 : 0, best && *best == i ? 1 : 0);
    out += buf;
  }
  return out;
}

Graph dummy_graph(Index num_nodes, Index num_features, std::uint64_t seed) {
  Graph g;
  g.topology.num_nodes = num_nodes;
  std::vector<Edge> edges;
  for (Index i = 0; i < num_nodes; ++i) {
    edges.push_back({i, (i + 1) % num_nodes});
    if (num_nodes > 4) edges.push_back({i, (i + 3) % num_nodes});
  }
  g.topology.edges = canonical_edges(std::move(edges));
  Rng rng(derive_seed(seed, "dummy"));
  g.features = random_matrix(num_nodes, num_features, rng, -1.0, 1.0);
  g.labels.assign(static_cast<std::size_t>(num_nodes), 0);
  g.num_classes = 1;
  return g;
}

HecheckResult run_hecheck(const ExperimentConfig& cfg, std::uint64_t epoch) {
  const Graph g = dummy_graph(cfg.hecheck_nodes, 3, cfg.seed);
  auto adj = std::make_shared<const SparseAdjacency>(normalize_adjacency(g));
  const ViewPair views = make_views(g.topology, adj, g.features, cfg.train.augment, epoch);
  const EncoderParams params = init_params(3, 4, 2, cfg.train.activation, cfg.seed);
  // Unchecked: the analysis is structural, so degenerate dummy values are fine.
  const StepTape step = record_step(views, params, cfg.train.loss, /*checked=*/false);
  HecheckResult r;
  r.circuit = step.tape->circuit(step.loss);
  r.report = analyze(r.circuit);
  r.backward = analyze_backward(r.circuit);
  return r;
}

Circuit encoder_circuit(const ExperimentConfig& cfg) {
  const Graph g = dummy_graph(cfg.hecheck_nodes, 3, cfg.seed);
  auto adj = std::make_shared<const SparseAdjacency>(normalize_adjacency(g));
  const EncoderParams params = init_params(3, 4, 2, cfg.train.activation, cfg.seed);
  Tape tape(false);
  Var z = encode(adj, tape.input(g.features, Encryption::kEncrypted, "x"),
                 tape.parameter(params.w1, "w1"), tape.parameter(params.w2, "w2"),
                 params.activation);
  return tape.circuit(z);
}

GradCheckSummary run_grad_check(const ExperimentConfig& cfg) {
  GradCheckSummary summary;
  Rng rng(derive_seed(cfg.seed, "gradcheck-inputs"));
  const GradCheckOptions options{.seed = cfg.seed};

  auto check = [&](const std::string& name, auto&& build) {
    Tape tape;
    Var out = build(tape);
    Var weights = tape.constant(random_matrix(out.shape().rows, out.shape().cols, rng, -1.0, 1.0));
    Var loss = sum_all(elem_mul(out, weights));
    const GradCheckReport rep = check_gradients(tape, loss, options);
    summary.per_op.emplace_back(name, rep.max_rel_error);
    summary.max_rel_error = std::max(summary.max_rel_error, rep.max_rel_error);
  };
  auto param = [&](Tape& t, Index r, Index c, double lo = -1.0, double hi = 1.0) {
    return t.parameter(random_matrix(r, c, rng, lo, hi));
  };
  Topology path{3, {{0, 1}, {1, 2}}};
  auto adj = std::make_shared<const SparseAdjacency>(normalize_adjacency<double>(path));

  check("dense_matmul", [&](Tape& t) { return matmul(param(t, 3, 4), param(t, 4, 3)); });
  check("spmm", [&](Tape& t) { return spmm(adj, param(t, 3, 4)); });
  check("transpose", [&](Tape& t) { return transpose(param(t, 3, 4)); });
  check("add", [&](Tape& t) { return param(t, 3, 4) + param(t, 3, 4); });
  check("sub", [&](Tape& t) { return param(t, 3, 4) - param(t, 3, 4); });
  check("scale_by_constant", [&](Tape& t) { return scale(param(t, 3, 4), -1.7); });
  check("add_constant", [&](Tape& t) { return add_constant(param(t, 3, 4), 0.3); });
  check("elem_square", [&](Tape& t) { return square(param(t, 3, 4)); });
  check("elem_mul", [&](Tape& t) { return elem_mul(param(t, 3, 4), param(t, 3, 4)); });
  check("relu", [&](Tape& t) { return relu(param(t, 3, 4)); });
  check("exp", [&](Tape& t) { return exp(param(t, 3, 4)); });
  check("log", [&](Tape& t) { return log(param(t, 3, 4, 0.5, 1.5)); });
  check("row_l2_normalize", [&](Tape& t) { return row_l2_normalize(param(t, 3, 4)); });
  check("diag_of", [&](Tape& t) { return diag_of(param(t, 4, 4)); });
  check("mean_all", [&](Tape& t) { return mean_all(param(t, 3, 4)); });
  check("sum_all", [&](Tape& t) { return sum_all(param(t, 3, 4)); });
  check("frobenius_sq", [&](Tape& t) { return frobenius_sq(param(t, 3, 4)); });
  check("off_diagonal_mean", [&](Tape& t) { return off_diagonal_mean(param(t, 4, 4), 0.5); });

  const Graph g = dummy_graph(8, 5, cfg.seed);
  auto base = std::make_shared<const SparseAdjacency>(normalize_adjacency(g));
  const ViewPair views = make_views(g.topology, base, g.features, cfg.train.augment, 0);
  const EncoderParams params = init_params(5, 4, 3, cfg.train.activation, cfg.seed);
  StepTape step = record_step(views, params, cfg.train.loss);
  const GradCheckReport rep = check_gradients(*step.tape, step.loss, options);
  summary.pipeline_max_rel_error = rep.max_rel_error;
  summary.max_rel_error = std::max(summary.max_rel_error, rep.max_rel_error);
  return summary;
}

}  // namespace polygcl
