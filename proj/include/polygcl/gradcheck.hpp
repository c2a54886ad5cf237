#pragma once

#include <cstdint>
#include <vector>

#include "polygcl/tape.hpp"

namespace polygcl {

struct GradCheckOptions {
  double epsilon = 1e-6;
  // Entries whose analytic and numeric magnitudes both fall below this floor
  // are compared in absolute terms; finite differences cannot resolve them
  // relatively.
  double denominator_floor = 1e-4;
  // 0 checks every entry; otherwise a seeded sample of this many per parameter.
  std::size_t max_entries_per_parameter = 0;
  std::uint64_t seed = 0;
};

struct ParameterCheck {
  NodeId parameter = 0;
  std::string label;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // coordinates whose stencil crosses a relu kink
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::vector<ParameterCheck> parameters;

  bool passed(double tolerance) const {
    return checked > 0 && max_rel_error <= tolerance;
  }
};

// Compares reverse-mode gradients of `output` against central finite
// differences over every parameter leaf. Leaf values are restored afterwards.
GradCheckReport check_gradients(Tape& tape, Var output,
                                const GradCheckOptions& options = {});

}  // namespace polygcl
