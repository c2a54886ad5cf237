#include "polygcl/probe.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "polygcl/errors.hpp"
#include "polygcl/rng.hpp"
#include "polygcl/trainer.hpp"

namespace polygcl {
namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, std::span<const Index> rows) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

// Row-wise softmax in place, stabilized by the row max.
void softmax_rows(Eigen::MatrixXd& logits) {
  for (Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - mx).exp();
    logits.row(r) /= logits.row(r).sum();
  }
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

EvalReport linear_probe(const Eigen::MatrixXd& embeddings, std::span<const int> labels,
                        int num_classes, const SplitMasks& masks, const ProbeConfig& cfg,
                        const std::optional<Eigen::MatrixXd>& initial_weights) {
  if (masks.test.empty()) throw std::invalid_argument("linear_probe: empty test mask");
  if (masks.train.empty()) throw std::invalid_argument("linear_probe: empty train mask");
  if (static_cast<Index>(labels.size()) != embeddings.rows()) {
    throw ShapeError("linear_probe: one label per embedding row required");
  }
  const Index dim = embeddings.cols();
  Eigen::MatrixXd x_train = gather_rows(embeddings, masks.train);
  Eigen::MatrixXd x_test = gather_rows(embeddings, masks.test);
  if (cfg.standardize) {
    const Eigen::RowVectorXd mean = x_train.colwise().mean();
    Eigen::RowVectorXd sd =
        ((x_train.rowwise() - mean).array().square().colwise().mean()).sqrt();
    sd = (sd.array() > 0.0).select(sd, 1.0);
    x_train = (x_train.rowwise() - mean).array().rowwise() / sd.array();
    x_test = (x_test.rowwise() - mean).array().rowwise() / sd.array();
  }

  const Index n_train = x_train.rows();
  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n_train, num_classes);
  for (Index i = 0; i < n_train; ++i) {
    onehot(i, labels[static_cast<std::size_t>(masks.train[static_cast<std::size_t>(i)])]) = 1.0;
  }

  Eigen::MatrixXd w(dim, num_classes);
  if (initial_weights) {
    if (initial_weights->rows() != dim || initial_weights->cols() != num_classes) {
      throw ShapeError("linear_probe: initial weights must be D x C");
    }
    w = *initial_weights;
  } else {
    Rng rng(derive_seed(cfg.seed, "probe"));
    glorot_uniform(w, rng);
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1, num_classes);

  AdamConfig weight_opt;
  weight_opt.lr = cfg.lr;
  weight_opt.weight_decay = cfg.l2;
  AdamConfig bias_opt = weight_opt;
  bias_opt.weight_decay = 0.0;
  AdamState w_state;
  AdamState b_state;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Eigen::MatrixXd p = (x_train * w).rowwise() + b.row(0);
    softmax_rows(p);
    const Eigen::MatrixXd delta = (p - onehot) / static_cast<double>(n_train);
    const Eigen::MatrixXd gw = x_train.transpose() * delta;
    const Eigen::MatrixXd gb = delta.colwise().sum();
    adam_step(w, gw, w_state, weight_opt);
    adam_step(b, gb, b_state, bias_opt);
  }

  const Eigen::MatrixXd logits = (x_test * w).rowwise() + b.row(0);
  EvalReport report;
  report.train_size = n_train;
  report.test_size = static_cast<Index>(masks.test.size());
  std::vector<Index> class_total(static_cast<std::size_t>(num_classes), 0);
  std::vector<Index> class_correct(static_cast<std::size_t>(num_classes), 0);
  for (Index i = 0; i < logits.rows(); ++i) {
    Index predicted = 0;
    logits.row(i).maxCoeff(&predicted);
    const int truth = labels[static_cast<std::size_t>(masks.test[static_cast<std::size_t>(i)])];
    ++class_total[static_cast<std::size_t>(truth)];
    if (predicted == truth) {
      ++report.correct;
      ++class_correct[static_cast<std::size_t>(truth)];
    }
  }
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.test_size);
  for (int c = 0; c < num_classes; ++c) {
    const auto k = static_cast<std::size_t>(c);
    report.per_class_accuracy.push_back(
        class_total[k] > 0 ? static_cast<double>(class_correct[k]) / static_cast<double>(class_total[k])
                           : std::numeric_limits<double>::quiet_NaN());
  }
  return report;
}

EvalReport evaluate_pipeline(const Graph& g, const EncoderParams& params,
                             const SplitMasks& masks, const ProbeConfig& cfg,
                             Eigen::MatrixXd* embeddings_out) {
  const SparseAdjacency adj = normalize_adjacency(g);
  Eigen::MatrixXd z = encode(adj, g.features, params);
  EvalReport report = linear_probe(z, g.labels, g.num_classes, masks, cfg);
  if (embeddings_out) *embeddings_out = std::move(z);
  return report;
}

void export_embeddings(const std::filesystem::path& path, const Eigen::MatrixXd& embeddings,
                       std::span<const int> labels) {
  if (static_cast<Index>(labels.size()) != embeddings.rows()) {
    throw ShapeError("export_embeddings: one label per row required");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::string line = "node_id,label";
  for (Index c = 0; c < embeddings.cols(); ++c) line += ",z_" + std::to_string(c);
  out << line << '\n';
  for (Index r = 0; r < embeddings.rows(); ++r) {
    line = std::to_string(r) + "," + std::to_string(labels[static_cast<std::size_t>(r)]);
    for (Index c = 0; c < embeddings.cols(); ++c) {
      line += ',';
      append_double(line, embeddings(r, c));
    }
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header");
  const auto dim = static_cast<Index>(std::count(line.begin(), line.end(), ',')) - 1;
  std::vector<std::vector<double>> rows;
  EmbeddingTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> values;
    std::size_t pos = 0;
    int field = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const char* first = line.data() + pos;
      const char* last = line.data() + comma;
      if (field == 1) {
        int label = 0;
        std::from_chars(first, last, label);
        table.labels.push_back(label);
      } else if (field >= 2) {
        double v = 0.0;
        const auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc() || res.ptr != last) {
          throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad value");
        }
        values.push_back(v);
      }
      ++field;
      pos = comma + 1;
    }
    if (static_cast<Index>(values.size()) != dim) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    }
    rows.push_back(std::move(values));
  }
  table.embeddings.resize(static_cast<Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Index c = 0; c < dim; ++c) {
      table.embeddings(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
  }
  return table;
}

}  // namespace polygcl
