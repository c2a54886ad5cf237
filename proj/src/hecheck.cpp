#include "polygcl/hecheck.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "polygcl/errors.hpp"

namespace polygcl {
namespace {

// Symbolic state of a value in the circuit.
struct Sym {
  bool encrypted = false;
  bool defined = true;  // false downstream of a non-polynomial op
  int level = 0;
  int ctct = 0;
  long long degree = 0;
};

Sym plaintext() { return {}; }

Sym multiply(const Sym& a, const Sym& b) {
  Sym out;
  out.defined = a.defined && b.defined;
  if (a.encrypted && b.encrypted) {
    out.encrypted = true;
    out.level = std::max(a.level, b.level) + 1;
    out.ctct = std::max(a.ctct, b.ctct) + 1;
    out.degree = a.degree + b.degree;
  } else if (a.encrypted || b.encrypted) {
    const Sym& c = a.encrypted ? a : b;
    out.encrypted = true;
    out.level = c.level + 1;
    out.ctct = c.ctct;
    out.degree = c.degree;
  }
  return out;
}

Sym scale_plain(const Sym& a) { return multiply(a, plaintext()); }

Sym combine(const Sym& a, const Sym& b) {
  Sym out;
  out.defined = a.defined && b.defined;
  out.encrypted = a.encrypted || b.encrypted;
  if (a.encrypted) {
    out.level = a.level;
    out.ctct = a.ctct;
    out.degree = a.degree;
  }
  if (b.encrypted) {
    out.level = std::max(out.level, b.level);
    out.ctct = std::max(out.ctct, b.ctct);
    out.degree = std::max(out.degree, b.degree);
  }
  return out;
}

Sym non_polynomial(const Sym& a) {
  Sym out = a;
  if (a.encrypted) out.defined = false;
  return out;
}

std::vector<Sym> forward_syms(const Circuit& circuit) {
  std::vector<Sym> sym(circuit.nodes.size());
  for (const CircuitNode& n : circuit.nodes) {
    Sym s;
    if (is_leaf(n.op)) {
      s.encrypted = n.meta.encrypted;
      s.degree = s.encrypted ? 1 : 0;
    } else {
      switch (n.meta.mult) {
        case MultKind::kCtCt:
          s = n.inputs.size() == 2 ? multiply(sym[n.inputs[0]], sym[n.inputs[1]])
                                   : multiply(sym[n.inputs[0]], sym[n.inputs[0]]);
          break;
        case MultKind::kCtPt:
          s = n.inputs.size() == 2 ? multiply(sym[n.inputs[0]], sym[n.inputs[1]])
                                   : scale_plain(sym[n.inputs[0]]);
          break;
        case MultKind::kNone:
          s = sym[n.inputs[0]];
          for (std::size_t k = 1; k < n.inputs.size(); ++k) {
            s = combine(s, sym[n.inputs[k]]);
          }
          break;
      }
      if (!n.meta.polynomial) s = non_polynomial(s);
    }
    sym[n.id] = s;
  }
  return sym;
}

}  // namespace

DepthReport analyze(const Circuit& circuit) {
  DepthReport report;
  const std::vector<Sym> sym = forward_syms(circuit);
  for (const CircuitNode& n : circuit.nodes) {
    const Sym& s = sym[n.id];
    if (!n.meta.polynomial && n.meta.encrypted) {
      report.offending_ops.push_back({n.id, n.op});
    }
    if (!s.encrypted || !s.defined) continue;
    report.per_node_level[n.id] = s.level;
    report.ctct_depth = std::max(report.ctct_depth, s.ctct);
    report.total_levels = std::max(report.total_levels, s.level);
  }
  report.compatible = report.offending_ops.empty();
  const Sym& out = sym.at(circuit.output);
  if (out.defined) report.max_degree = out.degree;
  return report;
}

void assert_compatible(const Circuit& circuit) {
  const DepthReport report = analyze(circuit);
  if (report.compatible) return;
  std::string msg = "circuit is not HE-compatible; non-polynomial ops on the encrypted path:";
  for (const OffendingOp& op : report.offending_ops) {
    msg += " " + std::to_string(op.id) + ":" + std::string(op_name(op.op));
  }
  throw HeIncompatibleError(msg);
}

BackwardDepthReport analyze_backward(const Circuit& circuit) {
  const std::vector<Sym> fwd = forward_syms(circuit);
  std::vector<std::optional<Sym>> adj(circuit.nodes.size());
  adj[circuit.output] = plaintext();

  auto accumulate = [&](NodeId target, const Sym& contribution) {
    adj[target] = adj[target] ? combine(*adj[target], contribution) : contribution;
  };

  for (std::int64_t i = circuit.output; i >= 0; --i) {
    const CircuitNode& n = circuit.nodes[static_cast<std::size_t>(i)];
    if (!adj[n.id] || is_leaf(n.op)) continue;
    Sym g = *adj[n.id];
    if (!n.meta.polynomial) g = non_polynomial(combine(g, fwd[n.id]));
    auto in = [&](std::size_t k) { return n.inputs[k]; };
    switch (n.op) {
      case Op::kDenseMatmul:
      case Op::kElemMul:
        accumulate(in(0), multiply(g, fwd[in(1)]));
        accumulate(in(1), multiply(fwd[in(0)], g));
        break;
      case Op::kSpmm:
      case Op::kScale:
        accumulate(in(0), scale_plain(g));
        break;
      case Op::kElemSquare:
      case Op::kFrobeniusSq:
      case Op::kOffDiagonalMean:
        accumulate(in(0), multiply(fwd[in(0)], g));
        break;
      case Op::kRelu:
      case Op::kExp:
      case Op::kLog:
      case Op::kRowL2Normalize:
        accumulate(in(0), non_polynomial(combine(g, fwd[in(0)])));
        break;
      default:
        for (const NodeId k : n.inputs) accumulate(k, g);
        break;
    }
  }

  BackwardDepthReport report;
  for (const CircuitNode& n : circuit.nodes) {
    if (n.op != Op::kParameter) continue;
    GradientDepth gd;
    gd.parameter = n.id;
    if (adj[n.id]) {
      const Sym& s = *adj[n.id];
      gd.encrypted = s.encrypted;
      gd.polynomial = s.defined;
      gd.level = s.level;
      gd.ctct = s.ctct;
      gd.degree = s.degree;
    }
    report.polynomial = report.polynomial && gd.polynomial;
    if (gd.encrypted && gd.polynomial) {
      report.ctct_depth = std::max(report.ctct_depth, gd.ctct);
      report.total_levels = std::max(report.total_levels, gd.level);
    }
    report.gradients.push_back(gd);
  }
  return report;
}

std::vector<double> magnitude_probe(Tape& tape,
                                    std::span<const std::pair<Var, Tensor>> feeds) {
  for (const auto& [leaf, value] : feeds) tape.set_value(leaf, value);
  tape.forward();
  std::vector<double> out(tape.size(), 0.0);
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const Tensor& v = tape.value(static_cast<NodeId>(i));
    if (v.size() > 0) out[i] = v.cwiseAbs().maxCoeff();
  }
  return out;
}

namespace {

nlohmann::json report_json(const DepthReport& report) {
  nlohmann::json j;
  j["compatible"] = report.compatible;
  j["ctct_depth"] = report.ctct_depth;
  j["total_levels"] = report.total_levels;
  j["max_degree"] = report.max_degree ? nlohmann::json(*report.max_degree) : nlohmann::json();
  j["offending_ops"] = nlohmann::json::array();
  for (const OffendingOp& op : report.offending_ops) {
    j["offending_ops"].push_back({{"id", op.id}, {"op", std::string(op_name(op.op))}});
  }
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [id, level] : report.per_node_level) levels[std::to_string(id)] = level;
  j["per_node_level"] = std::move(levels);
  return j;
}

}  // namespace

std::string to_json(const DepthReport& report, int indent) {
  return report_json(report).dump(indent);
}

std::string to_json(const DepthReport& report, const BackwardDepthReport& backward,
                    int indent) {
  nlohmann::json j = report_json(report);
  nlohmann::json b;
  b["polynomial"] = backward.polynomial;
  b["ctct_depth"] = backward.ctct_depth;
  b["total_levels"] = backward.total_levels;
  b["gradients"] = nlohmann::json::array();
  for (const GradientDepth& g : backward.gradients) {
    b["gradients"].push_back({{"parameter", g.parameter},
                              {"encrypted", g.encrypted},
                              {"polynomial", g.polynomial},
                              {"level", g.level},
                              {"ctct", g.ctct},
                              {"degree", g.degree}});
  }
  j["backward"] = std::move(b);
  return j.dump(indent);
}

std::string format_table(const Circuit& circuit, const DepthReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(5) << "id" << std::setw(20) << "op" << std::setw(12)
      << "shape" << std::setw(5) << "enc" << std::setw(6) << "poly" << std::setw(7)
      << "mult" << "level\n";
  for (const CircuitNode& n : circuit.nodes) {
    const auto level = report.per_node_level.find(n.id);
    out << std::setw(5) << n.id << std::setw(20) << op_name(n.op) << std::setw(12)
        << to_string(n.shape) << std::setw(5) << (n.meta.encrypted ? "yes" : "no")
        << std::setw(6) << (n.meta.polynomial ? "yes" : "NO") << std::setw(7)
        << mult_kind_name(n.meta.mult)
        << (level != report.per_node_level.end() ? std::to_string(level->second) : "-")
        << '\n';
  }
  out << "compatible:   " << (report.compatible ? "yes" : "no") << '\n'
      << "ctct_depth:   " << report.ctct_depth << '\n'
      << "total_levels: " << report.total_levels << '\n'
      << "max_degree:   "
      << (report.max_degree ? std::to_string(*report.max_degree) : "undefined") << '\n';
  if (!report.offending_ops.empty()) {
    out << "offending:   ";
    for (const OffendingOp& op : report.offending_ops) {
      out << ' ' << op.id << ':' << op_name(op.op);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace polygcl
