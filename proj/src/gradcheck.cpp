#include "polygcl/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polygcl/rng.hpp"

namespace polygcl {
namespace {

// Sign pattern of every relu input; a stencil that flips one is discarded.
std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> relu_signs(const Tape& tape) {
  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> signs;
  for (const Node& n : tape.nodes()) {
    if (n.op != Op::kRelu) continue;
    signs.push_back(tape.value(n.inputs[0]).array() > 0.0);
  }
  return signs;
}

}  // namespace

GradCheckReport check_gradients(Tape& tape, Var output, const GradCheckOptions& options) {
  GradCheckReport report;
  const Gradients grads = tape.backward(output);
  Rng rng(derive_seed(options.seed, "gradcheck"));

  for (Var param : tape.parameters()) {
    const Tensor base = tape.value(param);
    const Tensor& analytic = grads[param];
    const auto size = static_cast<std::size_t>(base.size());

    std::vector<std::size_t> entries(size);
    std::iota(entries.begin(), entries.end(), std::size_t{0});
    if (options.max_entries_per_parameter > 0 && options.max_entries_per_parameter < size) {
      shuffle(entries, rng);
      entries.resize(options.max_entries_per_parameter);
      std::sort(entries.begin(), entries.end());
    }

    ParameterCheck pc;
    pc.parameter = param.id();
    pc.label = tape.node(param.id()).label;
    for (const std::size_t flat : entries) {
      const auto r = static_cast<Index>(flat) / base.cols();
      const auto c = static_cast<Index>(flat) % base.cols();

      Tensor probe = base;
      probe(r, c) = base(r, c) + options.epsilon;
      tape.set_value(param, probe);
      tape.forward();
      const double f_plus = tape.value(output)(0, 0);
      const auto signs_plus = relu_signs(tape);

      probe(r, c) = base(r, c) - options.epsilon;
      tape.set_value(param, probe);
      tape.forward();
      const double f_minus = tape.value(output)(0, 0);
      const auto signs_minus = relu_signs(tape);

      bool kink = false;
      for (std::size_t k = 0; k < signs_plus.size(); ++k) {
        kink = kink || (signs_plus[k] != signs_minus[k]).any();
      }
      if (kink) {
        ++pc.skipped;
        continue;
      }
      const double numeric = (f_plus - f_minus) / (2.0 * options.epsilon);
      const double a = analytic(r, c);
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      pc.max_rel_error = std::max(pc.max_rel_error, std::abs(a - numeric) / denom);
      ++pc.checked;
    }
    tape.set_value(param, base);
    report.checked += pc.checked;
    report.skipped += pc.skipped;
    report.max_rel_error = std::max(report.max_rel_error, pc.max_rel_error);
    report.parameters.push_back(std::move(pc));
  }
  tape.forward();
  return report;
}

}  // namespace polygcl
