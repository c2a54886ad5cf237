#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polygcl/errors.hpp"
#include "polygcl/experiment.hpp"

namespace fs = std::filesystem;
using namespace polygcl;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDivergence = 2,
  kHeIncompatible = 3,
};

// Options shared by every subcommand that consumes an experiment config.
struct ConfigOptions {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "key = value config file")
      ->check(CLI::ExistingFile);
  for (const std::string& key : config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [&opts, key](const std::string& v) { opts.overrides[key] = v; },
        std::string(config_key_help(key)));
  }
}

ExperimentConfig resolve_config(const ConfigOptions& opts, bool needs_data) {
  ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{}
                                                  : load_config_file(opts.config_path);
  for (const auto& [key, value] : opts.overrides) apply_setting(cfg, key, value);
  propagate_seed(cfg);
  validate(cfg, needs_data);
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void print_ingest_summary(const Graph& g, const IngestStats& stats) {
  std::printf("N=%lld F=%lld C=%d\n", static_cast<long long>(g.topology.num_nodes),
              static_cast<long long>(g.features.cols()), g.num_classes);
  std::printf("edges=%zu dropped_unknown=%lld self_loops=%lld duplicates=%lld\n",
              g.topology.edges.size(), static_cast<long long>(stats.dropped_unknown),
              static_cast<long long>(stats.self_loops), static_cast<long long>(stats.duplicates));
}

int cmd_ingest(const std::string& content, const std::string& cites, const std::string& out,
               std::optional<std::uint64_t> split_seed) {
  IngestStats stats;
  const Graph g = load_content_cites(content, cites, &stats);
  std::optional<SplitMasks> masks;
  if (split_seed) masks = make_split(g, *split_seed);
  save_canonical(out, g, masks);
  print_ingest_summary(g, stats);
  return kOk;
}

void epoch_printer(int epoch, double loss) {
  if (epoch % 10 == 0) std::fprintf(stderr, "epoch %4d  loss %.6f\n", epoch, loss);
}

int cmd_pretrain(const ExperimentConfig& cfg) {
  const Dataset data = load_dataset(cfg);
  const PretrainResult r = pretrain(data.graph.topology, data.graph.features, cfg.train,
                                    epoch_printer);
  fs::create_directories(cfg.output_dir);
  write_file(cfg.output_dir / "train_log.json", train_log_json(r.log, cfg));
  write_file(cfg.output_dir / "config.echo", config_echo_text(cfg));
  save_checkpoint(cfg.output_dir / "checkpoint.bin", r.params);
  std::printf("final_loss=%.17g epochs=%zu\n",
              r.log.losses.empty() ? 0.0 : r.log.losses.back(), r.log.losses.size());
  return kOk;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& checkpoint) {
  const Dataset data = load_dataset(cfg);
  const EncoderParams params = load_checkpoint(checkpoint);
  Eigen::MatrixXd z;
  const EvalReport report = evaluate_pipeline(data.graph, params, data.masks, cfg.probe, &z);
  fs::create_directories(cfg.output_dir);
  write_file(cfg.output_dir / "eval_report.json", eval_report_json(report, cfg));
  write_file(cfg.output_dir / "config.echo", config_echo_text(cfg));
  export_embeddings(cfg.output_dir / "embeddings.csv", z, data.graph.labels);
  std::printf("accuracy=%.4f (%lld/%lld)\n", report.accuracy,
              static_cast<long long>(report.correct), static_cast<long long>(report.test_size));
  return kOk;
}

int cmd_run(const ExperimentConfig& cfg) {
  const Dataset data = load_dataset(cfg);
  const RunResult r = run_experiment(data, cfg, cfg.output_dir);
  std::printf("accuracy=%.4f (%lld/%lld)\n", r.eval.accuracy,
              static_cast<long long>(r.eval.correct), static_cast<long long>(r.eval.test_size));
  return kOk;
}

int cmd_ablate(const ExperimentConfig& cfg) {
  const Dataset data = load_dataset(cfg);
  const auto cells = run_ablation(data, cfg, cfg.output_dir);
  std::fputs(ablation_table(cells).c_str(), stdout);
  return kOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::vector<double>& values) {
  const Dataset data = load_dataset(cfg);
  const auto points = run_lambda_sweep(data, cfg, values, cfg.output_dir);
  std::fputs(sweep_csv(points).c_str(), stdout);
  if (const auto best = sweep_argmax(points)) {
    std::printf("# argmax lambda=%g (reference 1e-2)\n", points[*best].lambda);
  }
  return kOk;
}

int cmd_hecheck(const ExperimentConfig& cfg, bool json, const std::string& dump_path,
                std::uint64_t epoch) {
  const HecheckResult r = run_hecheck(cfg, epoch);
  if (!dump_path.empty()) write_file(dump_path, dump_circuit(r.circuit));
  if (json) {
    std::cout << to_json(r.report, r.backward) << '\n';
  } else {
    std::cout << format_table(r.circuit, r.report);
  }
  try {
    assert_compatible(r.circuit);
  } catch (const HeIncompatibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kHeIncompatible;
  }
  return kOk;
}

int cmd_grad_check(const ExperimentConfig& cfg, double tolerance) {
  const GradCheckSummary s = run_grad_check(cfg);
  for (const auto& [op, err] : s.per_op) std::printf("%-20s %.3e\n", op.c_str(), err);
  std::printf("%-20s %.3e\n", "pipeline", s.pipeline_max_rel_error);
  const bool ok = s.max_rel_error <= tolerance;
  std::printf("max_rel_error=%.3e tolerance=%.1e %s\n", s.max_rel_error, tolerance,
              ok ? "PASS" : "FAIL");
  return ok ? kOk : kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial graph contrastive learning engine"};
  app.require_subcommand(1);

  std::string content, cites, canonical_out;
  std::optional<std::uint64_t> split_seed;
  auto* ingest = app.add_subcommand("ingest", "raw content/cites -> canonical JSON");
  ingest->add_option("--content", content)->required()->check(CLI::ExistingFile);
  ingest->add_option("--cites", cites)->required()->check(CLI::ExistingFile);
  ingest->add_option("-o,--out", canonical_out)->required();
  ingest->add_option("--split-seed", split_seed, "embed a seeded 20/500/1000 split");

  ConfigOptions pre_opts, eval_opts, run_opts, ablate_opts, sweep_opts, he_opts, gc_opts;
  auto* pre = app.add_subcommand("pretrain", "self-supervised pre-training only");
  add_config_options(pre, pre_opts);

  std::string checkpoint;
  auto* eval = app.add_subcommand("eval", "linear probe on a frozen checkpoint");
  add_config_options(eval, eval_opts);
  eval->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "pretrain, evaluate and write reports");
  add_config_options(run, run_opts);

  auto* ablate = app.add_subcommand("ablate", "2x2 activation/loss grid");
  add_config_options(ablate, ablate_opts);

  std::vector<double> lambdas = kDefaultLambdaGrid;
  auto* sweep = app.add_subcommand("sweep-lambda", "accuracy over a lambda grid");
  add_config_options(sweep, sweep_opts);
  sweep->add_option("--values", lambdas, "lambda grid")->delimiter(',');

  bool json = false;
  std::string dump_path;
  std::uint64_t he_epoch = 0;
  auto* he = app.add_subcommand("hecheck", "static HE compatibility and depth report");
  add_config_options(he, he_opts);
  he->add_flag("--json", json);
  he->add_option("--dump", dump_path, "write the circuit dump here");
  he->add_option("--epoch", he_epoch, "augmentation epoch to record");

  double tolerance = 1e-5;
  auto* gc = app.add_subcommand("grad-check", "finite-difference gradient check");
  add_config_options(gc, gc_opts);
  gc->add_option("--tolerance", tolerance);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) return cmd_ingest(content, cites, canonical_out, split_seed);
    if (*pre) return cmd_pretrain(resolve_config(pre_opts, true));
    if (*eval) return cmd_eval(resolve_config(eval_opts, true), checkpoint);
    if (*run) return cmd_run(resolve_config(run_opts, true));
    if (*ablate) return cmd_ablate(resolve_config(ablate_opts, true));
    if (*sweep) return cmd_sweep(resolve_config(sweep_opts, true), lambdas);
    if (*he) return cmd_hecheck(resolve_config(he_opts, false), json, dump_path, he_epoch);
    if (*gc) return cmd_grad_check(resolve_config(gc_opts, false), tolerance);
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDivergence;
  } catch (const HeIncompatibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kHeIncompatible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
