#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polygcl/tape.hpp"

namespace polygcl {

struct OffendingOp {
  NodeId id = 0;
  Op op = Op::kConstant;
  friend bool operator==(const OffendingOp&, const OffendingOp&) = default;
};

// Static view of a circuit under HE constraints.
//
// Levels: encrypted inputs start at 0. ct-pt products add one level (counted
// in total_levels only); ct-ct products take max(input levels) + 1 and count
// in both metrics; every other polynomial op takes the max of its encrypted
// inputs. Degrees in the encrypted inputs: ct-pt keeps the degree, ct-ct adds
// operand degrees, everything else takes the max.
//
// Non-polynomial nodes on the encrypted path are listed as offending; they and
// their descendants get no level, so levels cover the polynomial prefix only.
struct DepthReport {
  bool compatible = true;
  std::vector<OffendingOp> offending_ops;
  int ctct_depth = 0;
  int total_levels = 0;
  std::map<NodeId, int> per_node_level;  // encrypted nodes with a defined level
  std::optional<long long> max_degree;   // degree of the output; unset if undefined

  friend bool operator==(const DepthReport&, const DepthReport&) = default;
};

DepthReport analyze(const Circuit& circuit);
inline DepthReport analyze(const Tape& tape, Var output) {
  return analyze(tape.circuit(output));
}

// Throws HeIncompatibleError naming every offending node ("id:op").
void assert_compatible(const Circuit& circuit);
inline void assert_compatible(const Tape& tape, Var output) {
  assert_compatible(tape.circuit(output));
}

// Depth of the reverse-mode gradient circuit for each parameter, derived from
// the forward circuit with the same level rules. Integer factors (the 2 in
// d(x^2)) and averaging constants are free, like the forward means.
struct GradientDepth {
  NodeId parameter = 0;
  bool encrypted = false;
  bool polynomial = true;
  int level = 0;
  int ctct = 0;
  long long degree = 0;
  friend bool operator==(const GradientDepth&, const GradientDepth&) = default;
};

struct BackwardDepthReport {
  bool polynomial = true;
  int ctct_depth = 0;
  int total_levels = 0;
  std::vector<GradientDepth> gradients;
  friend bool operator==(const BackwardDepthReport&, const BackwardDepthReport&) = default;
};

BackwardDepthReport analyze_backward(const Circuit& circuit);

// Replays the tape with `feeds` and returns max |value| per node: a plaintext
// proxy for noise-growth risk, not a noise estimate.
std::vector<double> magnitude_probe(Tape& tape,
                                    std::span<const std::pair<Var, Tensor>> feeds);

std::string to_json(const DepthReport& report, int indent = 2);
std::string to_json(const DepthReport& report, const BackwardDepthReport& backward,
                    int indent = 2);
std::string format_table(const Circuit& circuit, const DepthReport& report);

}  // namespace polygcl
