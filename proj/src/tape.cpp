#include "polygcl/tape.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "polygcl/errors.hpp"

namespace polygcl {
namespace {

constexpr std::array<std::pair<Op, std::string_view>, 21> kOpNames{{
    {Op::kInput, "input"},
    {Op::kParameter, "parameter"},
    {Op::kConstant, "constant"},
    {Op::kDenseMatmul, "dense_matmul"},
    {Op::kSpmm, "spmm"},
    {Op::kTranspose, "transpose"},
    {Op::kAdd, "add"},
    {Op::kSub, "sub"},
    {Op::kScale, "scale_by_constant"},
    {Op::kAddConstant, "add_constant"},
    {Op::kElemSquare, "elem_square"},
    {Op::kElemMul, "elem_mul"},
    {Op::kRelu, "relu"},
    {Op::kExp, "exp"},
    {Op::kLog, "log"},
    {Op::kRowL2Normalize, "row_l2_normalize"},
    {Op::kDiagOf, "diag_of"},
    {Op::kMeanAll, "mean_all"},
    {Op::kSumAll, "sum_all"},
    {Op::kFrobeniusSq, "frobenius_sq"},
    {Op::kOffDiagonalMean, "off_diagonal_mean"},
}};

std::string describe(NodeId id, Op op) {
  return "node " + std::to_string(id) + " (" + std::string(op_name(op)) + ")";
}

[[noreturn]] void shape_fail(NodeId id, Op op, const std::string& what) {
  throw ShapeError(describe(id, op) + ": " + what);
}

Shape infer_shape(NodeId id, Op op, const std::vector<Shape>& in,
                  const SparseAdjacency* sparse) {
  switch (op) {
    case Op::kDenseMatmul:
      if (in[0].cols != in[1].rows) {
        shape_fail(id, op, "cannot multiply " + to_string(in[0]) + " by " +
                               to_string(in[1]));
      }
      return {in[0].rows, in[1].cols};
    case Op::kSpmm:
      if (sparse == nullptr) shape_fail(id, op, "missing sparse operand");
      if (sparse->cols() != in[0].rows) {
        shape_fail(id, op, "sparse " + std::to_string(sparse->rows()) + "x" +
                               std::to_string(sparse->cols()) +
                               " cannot multiply " + to_string(in[0]));
      }
      return {sparse->rows(), in[0].cols};
    case Op::kTranspose:
      return {in[0].cols, in[0].rows};
    case Op::kAdd:
    case Op::kSub:
    case Op::kElemMul:
      if (!(in[0] == in[1])) {
        shape_fail(id, op, "operand shapes differ: " + to_string(in[0]) +
                               " vs " + to_string(in[1]));
      }
      return in[0];
    case Op::kScale:
    case Op::kAddConstant:
    case Op::kElemSquare:
    case Op::kRelu:
    case Op::kExp:
    case Op::kLog:
    case Op::kRowL2Normalize:
      return in[0];
    case Op::kDiagOf:
      if (in[0].rows != in[0].cols) {
        shape_fail(id, op, "needs a square operand, got " + to_string(in[0]));
      }
      return {in[0].rows, 1};
    case Op::kOffDiagonalMean:
      if (in[0].rows != in[0].cols) {
        shape_fail(id, op, "needs a square operand, got " + to_string(in[0]));
      }
      if (in[0].rows < 2) {
        shape_fail(id, op, "needs at least two rows (no off-diagonal pairs)");
      }
      return {1, 1};
    case Op::kMeanAll:
    case Op::kSumAll:
    case Op::kFrobeniusSq:
      return {1, 1};
    case Op::kInput:
    case Op::kParameter:
    case Op::kConstant:
      break;
  }
  shape_fail(id, op, "not a computed op");
}

std::size_t arity(Op op) {
  switch (op) {
    case Op::kInput:
    case Op::kParameter:
    case Op::kConstant:
      return 0;
    case Op::kDenseMatmul:
    case Op::kAdd:
    case Op::kSub:
    case Op::kElemMul:
      return 2;
    default:
      return 1;
  }
}

NodeMeta infer_meta(Op op, const std::vector<const Node*>& in) {
  NodeMeta meta;
  std::size_t encrypted_inputs = 0;
  for (const Node* n : in) encrypted_inputs += n->meta.encrypted ? 1 : 0;
  meta.encrypted = encrypted_inputs > 0;
  meta.polynomial = is_polynomial(op);
  switch (op) {
    case Op::kDenseMatmul:
    case Op::kElemMul:
      if (encrypted_inputs == 2) {
        meta.mult = MultKind::kCtCt;
      } else if (encrypted_inputs == 1) {
        meta.mult = MultKind::kCtPt;
      }
      break;
    case Op::kElemSquare:
    case Op::kFrobeniusSq:
    case Op::kOffDiagonalMean:
      if (meta.encrypted) meta.mult = MultKind::kCtCt;
      break;
    case Op::kSpmm:
    case Op::kScale:
      if (meta.encrypted) meta.mult = MultKind::kCtPt;
      break;
    default:
      break;
  }
  return meta;
}

// (S_ij - S_ii + m) for i != j, zero on the diagonal.
Tensor margin_residual(const Tensor& s, double margin) {
  Tensor r = (s.colwise() - s.diagonal()).array() + margin;
  r.diagonal().setZero();
  return r;
}

}  // namespace

std::string_view op_name(Op op) {
  for (const auto& [o, name] : kOpNames) {
    if (o == op) return name;
  }
  return "unknown";
}

std::optional<Op> op_from_name(std::string_view name) {
  for (const auto& [o, n] : kOpNames) {
    if (n == name) return o;
  }
  return std::nullopt;
}

bool is_leaf(Op op) {
  return op == Op::kInput || op == Op::kParameter || op == Op::kConstant;
}

bool is_polynomial(Op op) {
  switch (op) {
    case Op::kRelu:
    case Op::kExp:
    case Op::kLog:
    case Op::kRowL2Normalize:
      return false;
    default:
      return true;
  }
}

std::string_view mult_kind_name(MultKind kind) {
  switch (kind) {
    case MultKind::kNone:
      return "none";
    case MultKind::kCtCt:
      return "ct_ct";
    case MultKind::kCtPt:
      return "ct_pt";
  }
  return "none";
}

std::optional<MultKind> mult_kind_from_name(std::string_view name) {
  for (const MultKind k : {MultKind::kNone, MultKind::kCtCt, MultKind::kCtPt}) {
    if (mult_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string to_string(const Shape& s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

const Tensor& Gradients::operator[](Var v) const {
  if (!contains(v)) {
    throw std::out_of_range("no gradient recorded for node " + std::to_string(v.id()));
  }
  return *by_node_[v.id()];
}

bool Gradients::contains(Var v) const {
  return v.id() < by_node_.size() && by_node_[v.id()].has_value();
}

Var Tape::input(Tensor value, Encryption enc, std::string label) {
  Node n;
  n.op = Op::kInput;
  n.shape = {value.rows(), value.cols()};
  n.meta.encrypted = enc == Encryption::kEncrypted;
  n.label = std::move(label);
  nodes_.push_back(std::move(n));
  values_.push_back(std::move(value));
  check_values(static_cast<NodeId>(nodes_.size() - 1));
  return {this, static_cast<NodeId>(nodes_.size() - 1)};
}

Var Tape::parameter(Tensor value, std::string label) {
  Node n;
  n.op = Op::kParameter;
  n.shape = {value.rows(), value.cols()};
  n.label = std::move(label);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  values_.push_back(std::move(value));
  check_values(static_cast<NodeId>(nodes_.size() - 1));
  return {this, static_cast<NodeId>(nodes_.size() - 1)};
}

Var Tape::constant(Tensor value, std::string label) {
  Node n;
  n.op = Op::kConstant;
  n.shape = {value.rows(), value.cols()};
  n.label = std::move(label);
  nodes_.push_back(std::move(n));
  values_.push_back(std::move(value));
  check_values(static_cast<NodeId>(nodes_.size() - 1));
  return {this, static_cast<NodeId>(nodes_.size() - 1)};
}

Var Tape::record(Op op, std::vector<NodeId> inputs, double scalar,
                 std::shared_ptr<const SparseAdjacency> sparse) {
  const auto id = static_cast<NodeId>(nodes_.size());
  if (is_leaf(op)) shape_fail(id, op, "leaves are created with input/parameter/constant");
  if (inputs.size() != arity(op)) {
    shape_fail(id, op, "expects " + std::to_string(arity(op)) + " inputs, got " +
                           std::to_string(inputs.size()));
  }
  std::vector<Shape> shapes;
  std::vector<const Node*> in_nodes;
  for (const NodeId i : inputs) {
    if (i >= id) shape_fail(id, op, "input " + std::to_string(i) + " is not on the tape");
    shapes.push_back(nodes_[i].shape);
    in_nodes.push_back(&nodes_[i]);
  }
  Node n;
  n.op = op;
  n.shape = infer_shape(id, op, shapes, sparse.get());
  n.meta = infer_meta(op, in_nodes);
  n.scalar = scalar;
  n.sparse = std::move(sparse);
  for (const Node* in : in_nodes) n.requires_grad = n.requires_grad || in->requires_grad;
  n.inputs = std::move(inputs);
  Tensor v = evaluate(n, id);
  nodes_.push_back(std::move(n));
  values_.push_back(std::move(v));
  check_values(id);
  return {this, id};
}

std::vector<Var> Tape::parameters() {
  std::vector<Var> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op == Op::kParameter) out.emplace_back(this, static_cast<NodeId>(i));
  }
  return out;
}

void Tape::set_value(Var leaf, Tensor value) {
  const Node& n = nodes_.at(leaf.id());
  if (!is_leaf(n.op)) {
    throw ShapeError(describe(leaf.id(), n.op) + ": only leaves can be set");
  }
  if (value.rows() != n.shape.rows || value.cols() != n.shape.cols) {
    throw ShapeError(describe(leaf.id(), n.op) + ": expected " + to_string(n.shape) +
                     ", got " + std::to_string(value.rows()) + "x" +
                     std::to_string(value.cols()));
  }
  values_[leaf.id()] = std::move(value);
  check_values(leaf.id());
}

void Tape::forward() {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (is_leaf(nodes_[i].op)) continue;
    values_[i] = evaluate(nodes_[i], static_cast<NodeId>(i));
    check_values(static_cast<NodeId>(i));
  }
}

const Tensor& Tape::forward(std::span<const std::pair<Var, Tensor>> feeds, Var output) {
  for (const auto& [leaf, v] : feeds) set_value(leaf, v);
  forward();
  return value(output);
}

void Tape::check_values(NodeId id) const {
  if (!checked_) return;
  const Node& n = nodes_[id];
  const Tensor& v = values_[id];
  if (v.rows() != n.shape.rows || v.cols() != n.shape.cols) {
    throw ShapeError(describe(id, n.op) + ": value shape does not match " +
                     to_string(n.shape));
  }
  if (!v.allFinite()) {
    throw NumericError(describe(id, n.op) + ": non-finite value");
  }
}

Tensor Tape::evaluate(const Node& n, NodeId id) const {
  auto in = [&](std::size_t k) -> const Tensor& { return values_[n.inputs[k]]; };
  switch (n.op) {
    case Op::kDenseMatmul:
      return in(0) * in(1);
    case Op::kSpmm:
      return *n.sparse * in(0);
    case Op::kTranspose:
      return in(0).transpose();
    case Op::kAdd:
      return in(0) + in(1);
    case Op::kSub:
      return in(0) - in(1);
    case Op::kScale:
      return n.scalar * in(0);
    case Op::kAddConstant:
      return in(0).array() + n.scalar;
    case Op::kElemSquare:
      return in(0).array().square();
    case Op::kElemMul:
      return in(0).cwiseProduct(in(1));
    case Op::kRelu:
      return in(0).cwiseMax(0.0);
    case Op::kExp:
      return in(0).array().exp();
    case Op::kLog:
      if (checked_ && (in(0).array() <= 0.0).any()) {
        throw NumericError(describe(id, n.op) +
                           ": log of a non-positive value");
      }
      return in(0).array().log();
    case Op::kRowL2Normalize: {
      Tensor out = in(0);
      for (Index r = 0; r < out.rows(); ++r) {
        const double norm = out.row(r).norm();
        if (norm == 0.0) {
          if (checked_) {
            throw NumericError(describe(id, n.op) +
                               ": row " + std::to_string(r) + " has zero norm");
          }
          continue;
        }
        out.row(r) /= norm;
      }
      return out;
    }
    case Op::kDiagOf:
      return in(0).diagonal();
    case Op::kMeanAll:
      return Tensor::Constant(1, 1, in(0).mean());
    case Op::kSumAll:
      return Tensor::Constant(1, 1, in(0).sum());
    case Op::kFrobeniusSq:
      return Tensor::Constant(1, 1, in(0).squaredNorm());
    case Op::kOffDiagonalMean: {
      const double n_rows = static_cast<double>(in(0).rows());
      return Tensor::Constant(
          1, 1, margin_residual(in(0), n.scalar).squaredNorm() / (n_rows * (n_rows - 1)));
    }
    case Op::kInput:
    case Op::kParameter:
    case Op::kConstant:
      break;
  }
  return values_.at(id);
}

Gradients Tape::backward(Var output) const {
  const NodeId out = output.id();
  const Node& out_node = nodes_.at(out);
  if (out_node.shape.rows != 1 || out_node.shape.cols != 1) {
    throw ShapeError(describe(out, out_node.op) +
                     ": backward needs a scalar output, got " + to_string(out_node.shape));
  }
  std::vector<std::optional<Tensor>> adj(nodes_.size());
  adj[out] = Tensor::Ones(1, 1);

  auto accumulate = [&](NodeId target, Tensor contribution) {
    if (!nodes_[target].requires_grad) return;
    if (adj[target]) {
      *adj[target] += contribution;
    } else {
      adj[target] = std::move(contribution);
    }
  };

  for (std::int64_t i = out; i >= 0; --i) {
    const auto id = static_cast<NodeId>(i);
    const Node& n = nodes_[id];
    if (!adj[id] || !n.requires_grad || is_leaf(n.op)) continue;
    const Tensor g = std::move(*adj[id]);
    adj[id].reset();
    auto in = [&](std::size_t k) -> const Tensor& { return values_[n.inputs[k]]; };
    auto wants = [&](std::size_t k) { return nodes_[n.inputs[k]].requires_grad; };
    switch (n.op) {
      case Op::kDenseMatmul:
        if (wants(0)) accumulate(n.inputs[0], g * in(1).transpose());
        if (wants(1)) accumulate(n.inputs[1], in(0).transpose() * g);
        break;
      case Op::kSpmm:
        accumulate(n.inputs[0], n.sparse->transpose() * g);
        break;
      case Op::kTranspose:
        accumulate(n.inputs[0], g.transpose());
        break;
      case Op::kAdd:
        accumulate(n.inputs[0], g);
        accumulate(n.inputs[1], g);
        break;
      case Op::kSub:
        accumulate(n.inputs[0], g);
        accumulate(n.inputs[1], -g);
        break;
      case Op::kScale:
        accumulate(n.inputs[0], n.scalar * g);
        break;
      case Op::kAddConstant:
        accumulate(n.inputs[0], g);
        break;
      case Op::kElemSquare:
        accumulate(n.inputs[0], 2.0 * in(0).cwiseProduct(g));
        break;
      case Op::kElemMul:
        if (wants(0)) accumulate(n.inputs[0], g.cwiseProduct(in(1)));
        if (wants(1)) accumulate(n.inputs[1], g.cwiseProduct(in(0)));
        break;
      case Op::kRelu:
        accumulate(n.inputs[0],
                   (in(0).array() > 0.0).select(g, Tensor::Zero(g.rows(), g.cols())));
        break;
      case Op::kExp:
        accumulate(n.inputs[0], g.cwiseProduct(values_[id]));
        break;
      case Op::kLog:
        accumulate(n.inputs[0], g.cwiseQuotient(in(0)));
        break;
      case Op::kRowL2Normalize: {
        const Tensor& y = values_[id];
        Tensor gx(g.rows(), g.cols());
        for (Index r = 0; r < g.rows(); ++r) {
          const double norm = in(0).row(r).norm();
          if (norm == 0.0) {
            gx.row(r).setZero();
            continue;
          }
          const double dot = y.row(r).dot(g.row(r));
          gx.row(r) = (g.row(r) - dot * y.row(r)) / norm;
        }
        accumulate(n.inputs[0], std::move(gx));
        break;
      }
      case Op::kDiagOf: {
        Tensor ga = Tensor::Zero(n.shape.rows, n.shape.rows);
        ga.diagonal() = g.col(0);
        accumulate(n.inputs[0], std::move(ga));
        break;
      }
      case Op::kMeanAll: {
        const Shape s = nodes_[n.inputs[0]].shape;
        accumulate(n.inputs[0],
                   Tensor::Constant(s.rows, s.cols,
                                    g(0, 0) / static_cast<double>(s.rows * s.cols)));
        break;
      }
      case Op::kSumAll: {
        const Shape s = nodes_[n.inputs[0]].shape;
        accumulate(n.inputs[0], Tensor::Constant(s.rows, s.cols, g(0, 0)));
        break;
      }
      case Op::kFrobeniusSq:
        accumulate(n.inputs[0], (2.0 * g(0, 0)) * in(0));
        break;
      case Op::kOffDiagonalMean: {
        // dL/dS_ij = c R_ij (i != j), dL/dS_ii = -c sum_j R_ij,
        // c = 2 / (N (N - 1)).
        const double rows = static_cast<double>(in(0).rows());
        const double c = 2.0 * g(0, 0) / (rows * (rows - 1));
        Tensor r = margin_residual(in(0), n.scalar);
        const Eigen::VectorXd row_sums = r.rowwise().sum();
        r.diagonal() = -row_sums;
        accumulate(n.inputs[0], c * r);
        break;
      }
      case Op::kInput:
      case Op::kParameter:
      case Op::kConstant:
        break;
    }
  }

  std::vector<std::optional<Tensor>> grads(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op != Op::kParameter) continue;
    grads[i] = adj[i] ? std::move(*adj[i])
                      : Tensor::Zero(nodes_[i].shape.rows, nodes_[i].shape.cols);
  }
  return Gradients(std::move(grads));
}

Circuit Tape::circuit(Var output) const {
  Circuit c;
  c.output = output.id();
  c.nodes.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    c.nodes.push_back({static_cast<NodeId>(i), n.op, n.inputs, n.shape, n.meta});
  }
  return c;
}

std::string dump_circuit(const Circuit& circuit) {
  std::ostringstream out;
  for (const CircuitNode& n : circuit.nodes) {
    out << n.id << ' ' << op_name(n.op) << " [";
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      out << (k ? "," : "") << n.inputs[k];
    }
    out << "] " << to_string(n.shape) << " enc=" << (n.meta.encrypted ? "true" : "false")
        << " poly=" << (n.meta.polynomial ? "true" : "false")
        << " mult=" << mult_kind_name(n.meta.mult) << '\n';
  }
  out << "output " << circuit.output << '\n';
  return out.str();
}

namespace {

template <typename T>
T parse_number(std::string_view tok, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("circuit line " + std::to_string(line_no) + ": bad number '" +
                     std::string(tok) + "'");
  }
  return value;
}

bool parse_flag(std::string_view tok, std::string_view key, std::size_t line_no) {
  if (tok.substr(0, key.size()) != key) {
    throw ParseError("circuit line " + std::to_string(line_no) + ": expected " +
                     std::string(key));
  }
  const auto v = tok.substr(key.size());
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError("circuit line " + std::to_string(line_no) + ": bad flag '" +
                   std::string(tok) + "'");
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  bool have_output = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty() || tok[0].starts_with('#')) continue;
    if (tok[0] == "output") {
      if (tok.size() != 2) throw ParseError("circuit line " + std::to_string(line_no) + ": bad output line");
      c.output = parse_number<NodeId>(tok[1], line_no);
      have_output = true;
      continue;
    }
    if (tok.size() != 7) {
      throw ParseError("circuit line " + std::to_string(line_no) + ": expected 7 fields, got " +
                       std::to_string(tok.size()));
    }
    CircuitNode n;
    n.id = parse_number<NodeId>(tok[0], line_no);
    if (n.id != c.nodes.size()) {
      throw ParseError("circuit line " + std::to_string(line_no) + ": ids must be consecutive");
    }
    const auto op = op_from_name(tok[1]);
    if (!op) throw ParseError("circuit line " + std::to_string(line_no) + ": unknown op '" + tok[1] + "'");
    n.op = *op;
    std::string_view list = tok[2];
    if (list.size() < 2 || list.front() != '[' || list.back() != ']') {
      throw ParseError("circuit line " + std::to_string(line_no) + ": bad input list");
    }
    list = list.substr(1, list.size() - 2);
    while (!list.empty()) {
      const auto comma = list.find(',');
      const auto item = list.substr(0, comma);
      const auto input = parse_number<NodeId>(item, line_no);
      if (input >= n.id) {
        throw ParseError("circuit line " + std::to_string(line_no) + ": input " +
                         std::string(item) + " does not precede the node");
      }
      n.inputs.push_back(input);
      if (comma == std::string_view::npos) break;
      list = list.substr(comma + 1);
    }
    const std::string_view shape = tok[3];
    const auto x = shape.find('x');
    if (x == std::string_view::npos) throw ParseError("circuit line " + std::to_string(line_no) + ": bad shape");
    n.shape = {parse_number<Index>(shape.substr(0, x), line_no),
               parse_number<Index>(shape.substr(x + 1), line_no)};
    n.meta.encrypted = parse_flag(tok[4], "enc=", line_no);
    n.meta.polynomial = parse_flag(tok[5], "poly=", line_no);
    if (!std::string_view(tok[6]).starts_with("mult=")) {
      throw ParseError("circuit line " + std::to_string(line_no) + ": expected mult=");
    }
    const auto mult = mult_kind_from_name(std::string_view(tok[6]).substr(5));
    if (!mult) throw ParseError("circuit line " + std::to_string(line_no) + ": bad mult kind");
    n.meta.mult = *mult;
    c.nodes.push_back(std::move(n));
  }
  if (!have_output) throw ParseError("circuit has no output line");
  if (c.output >= c.nodes.size()) throw ParseError("circuit output id out of range");
  return c;
}

Var matmul(Var a, Var b) { return a.tape().record(Op::kDenseMatmul, {a.id(), b.id()}); }
Var spmm(std::shared_ptr<const SparseAdjacency> adj, Var x) {
  return x.tape().record(Op::kSpmm, {x.id()}, 0.0, std::move(adj));
}
Var transpose(Var a) { return a.tape().record(Op::kTranspose, {a.id()}); }
Var add(Var a, Var b) { return a.tape().record(Op::kAdd, {a.id(), b.id()}); }
Var sub(Var a, Var b) { return a.tape().record(Op::kSub, {a.id(), b.id()}); }
Var scale(Var a, double factor) { return a.tape().record(Op::kScale, {a.id()}, factor); }
Var add_constant(Var a, double constant) {
  return a.tape().record(Op::kAddConstant, {a.id()}, constant);
}
Var square(Var a) { return a.tape().record(Op::kElemSquare, {a.id()}); }
Var elem_mul(Var a, Var b) { return a.tape().record(Op::kElemMul, {a.id(), b.id()}); }
Var relu(Var a) { return a.tape().record(Op::kRelu, {a.id()}); }
Var exp(Var a) { return a.tape().record(Op::kExp, {a.id()}); }
Var log(Var a) { return a.tape().record(Op::kLog, {a.id()}); }
Var row_l2_normalize(Var a) { return a.tape().record(Op::kRowL2Normalize, {a.id()}); }
Var diag_of(Var a) { return a.tape().record(Op::kDiagOf, {a.id()}); }
Var mean_all(Var a) { return a.tape().record(Op::kMeanAll, {a.id()}); }
Var sum_all(Var a) { return a.tape().record(Op::kSumAll, {a.id()}); }
Var frobenius_sq(Var a) { return a.tape().record(Op::kFrobeniusSq, {a.id()}); }
Var off_diagonal_mean(Var s, double margin) {
  return s.tape().record(Op::kOffDiagonalMean, {s.id()}, margin);
}

}  // namespace polygcl
