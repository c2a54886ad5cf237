#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polygcl/graph.hpp"

namespace polygcl {

using Tensor = Eigen::MatrixXd;
using NodeId = std::uint32_t;

// Closed op set. Leaves (input, parameter, constant) hold values; every other
// op is evaluated from its inputs.
enum class Op : std::uint8_t {
  kInput,
  kParameter,
  kConstant,
  kDenseMatmul,
  kSpmm,
  kTranspose,
  kAdd,
  kSub,
  kScale,
  kAddConstant,
  kElemSquare,
  kElemMul,
  kRelu,
  kExp,
  kLog,
  kRowL2Normalize,
  kDiagOf,
  kMeanAll,
  kSumAll,
  kFrobeniusSq,
  kOffDiagonalMean,
};

inline constexpr Op kAllOps[] = {
    Op::kInput,      Op::kParameter,   Op::kConstant,       Op::kDenseMatmul,
    Op::kSpmm,       Op::kTranspose,   Op::kAdd,            Op::kSub,
    Op::kScale,      Op::kAddConstant, Op::kElemSquare,     Op::kElemMul,
    Op::kRelu,       Op::kExp,         Op::kLog,            Op::kRowL2Normalize,
    Op::kDiagOf,     Op::kMeanAll,     Op::kSumAll,         Op::kFrobeniusSq,
    Op::kOffDiagonalMean,
};

std::string_view op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);
bool is_leaf(Op op);
bool is_polynomial(Op op);

enum class MultKind : std::uint8_t { kNone, kCtCt, kCtPt };
std::string_view mult_kind_name(MultKind kind);
std::optional<MultKind> mult_kind_from_name(std::string_view name);

enum class Encryption : std::uint8_t { kPlaintext, kEncrypted };

struct Shape {
  Index rows = 0;
  Index cols = 0;
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

struct NodeMeta {
  bool encrypted = false;
  bool polynomial = true;
  MultKind mult = MultKind::kNone;
  friend bool operator==(const NodeMeta&, const NodeMeta&) = default;
};

struct Node {
  Op op = Op::kConstant;
  std::vector<NodeId> inputs;
  Shape shape;
  NodeMeta meta;
  double scalar = 0.0;  // scale factor, additive constant, or margin
  std::shared_ptr<const SparseAdjacency> sparse;  // spmm operand
  std::string label;                              // leaves only
  bool requires_grad = false;
};

// Structure of a recorded tape with values stripped: the arithmetic circuit.
struct CircuitNode {
  NodeId id = 0;
  Op op = Op::kConstant;
  std::vector<NodeId> inputs;
  Shape shape;
  NodeMeta meta;
  friend bool operator==(const CircuitNode&, const CircuitNode&) = default;
};

struct Circuit {
  std::vector<CircuitNode> nodes;
  NodeId output = 0;
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

// One line per node: "id op [inputs] RxC enc=bool poly=bool mult=kind",
// followed by a final "output id" line.
std::string dump_circuit(const Circuit& circuit);
Circuit parse_circuit(std::string_view text);

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, NodeId id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  NodeId id() const { return id_; }
  const Tensor& value() const;
  Shape shape() const;

 private:
  Tape* tape_ = nullptr;
  NodeId id_ = 0;
};

// Gradients of a scalar output with respect to every parameter leaf.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(std::vector<std::optional<Tensor>> by_node)
      : by_node_(std::move(by_node)) {}

  const Tensor& operator[](Var v) const;
  bool contains(Var v) const;

 private:
  std::vector<std::optional<Tensor>> by_node_;
};

// Define-by-run tape. Each op is evaluated eagerly when recorded; `forward`
// replays the recorded graph after leaf values change. Not thread-safe; use
// one tape per thread.
class Tape {
 public:
  // Checked mode rejects non-finite values, log of non-positive entries and
  // normalization of zero rows.
  explicit Tape(bool checked = true) : checked_(checked) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var input(Tensor value, Encryption enc, std::string label = "x");
  Var parameter(Tensor value, std::string label = "w");
  Var constant(Tensor value, std::string label = "c");

  // Records a non-leaf op; used by the free functions below.
  Var record(Op op, std::vector<NodeId> inputs, double scalar = 0.0,
             std::shared_ptr<const SparseAdjacency> sparse = nullptr);

  const Tensor& value(NodeId id) const { return values_.at(id); }
  const Tensor& value(Var v) const { return value(v.id()); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::span<const Node> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool checked() const { return checked_; }

  std::vector<Var> parameters();

  // Replaces a leaf value (same shape) without re-evaluating.
  void set_value(Var leaf, Tensor value);

  // Re-evaluates every non-leaf node in tape order.
  void forward();

  // Sets the given leaves, replays, and returns the value of `output`.
  const Tensor& forward(std::span<const std::pair<Var, Tensor>> feeds, Var output);

  // Reverse-mode sweep from a 1x1 output. Throws ShapeError otherwise.
  Gradients backward(Var output) const;

  Circuit circuit(Var output) const;

 private:
  void check_values(NodeId id) const;
  Tensor evaluate(const Node& node, NodeId id) const;

  bool checked_;
  std::vector<Node> nodes_;
  std::vector<Tensor> values_;
};

inline const Tensor& Var::value() const { return tape_->value(id_); }
inline Shape Var::shape() const { return tape_->node(id_).shape; }

// Op constructors.
Var matmul(Var a, Var b);
Var spmm(std::shared_ptr<const SparseAdjacency> adj, Var x);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double factor);
Var add_constant(Var a, double constant);
Var square(Var a);
Var elem_mul(Var a, Var b);
Var relu(Var a);
Var exp(Var a);
Var log(Var a);
Var row_l2_normalize(Var a);
Var diag_of(Var a);
Var mean_all(Var a);
Var sum_all(Var a);
Var frobenius_sq(Var a);
// mean over ordered pairs i != j of (S_ij - S_ii + margin)^2 for square S.
Var off_diagonal_mean(Var s, double margin);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(double c, Var a) { return scale(a, c); }

}  // namespace polygcl
