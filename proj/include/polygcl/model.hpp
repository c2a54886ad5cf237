#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>

#include "polygcl/graph.hpp"
#include "polygcl/rng.hpp"
#include "polygcl/tape.hpp"

namespace polygcl {

// kSquare is f(x) = x^2; kHalfSquare is 0.5 x^2 for runs that need the
// smaller pre-activation scale; kRelu is the non-polynomial baseline.
enum class Activation : std::uint32_t { kSquare = 0, kRelu = 1, kHalfSquare = 2 };

std::string_view activation_name(Activation a);
std::optional<Activation> activation_from_name(std::string_view name);

template <typename Scalar>
struct EncoderParamsT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> w1;  // F x H
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> w2;  // H x D
  Activation activation = Activation::kSquare;

  Index in_features() const { return w1.rows(); }
  Index hidden() const { return w1.cols(); }
  Index out() const { return w2.cols(); }
};
using EncoderParams = EncoderParamsT<double>;

inline constexpr Index kDefaultHidden = 64;
inline constexpr Index kDefaultOut = 128;

// Glorot-uniform fill in row-major order: U(-a, a), a = sqrt(6 / (rows + cols)).
template <typename Derived>
void glorot_uniform(Eigen::MatrixBase<Derived>& w, Rng& rng) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  const Scalar limit = sqrt(Scalar(6) / Scalar(w.rows() + w.cols()));
  for (Index r = 0; r < w.rows(); ++r) {
    for (Index c = 0; c < w.cols(); ++c) {
      w(r, c) = (Scalar(2) * Scalar(uniform01(rng)) - Scalar(1)) * limit;
    }
  }
}

EncoderParams init_params(Index f_in, Index hidden, Index out, Activation activation,
                          std::uint64_t seed);

// Records Z = A act(A X W1) W2 on the tape of `x`.
Var encode(const std::shared_ptr<const SparseAdjacency>& adjacency, Var x, Var w1,
           Var w2, Activation activation);

// Tape-free convenience: records onto a scratch tape and returns Z.
Eigen::MatrixXd encode(const SparseAdjacency& adjacency, const Eigen::MatrixXd& x,
                       const EncoderParams& params);

// Little-endian header of four uint32 {f_in, hidden, out, activation}
// followed by W1 then W2 as row-major float64.
void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params);
EncoderParams load_checkpoint(const std::filesystem::path& path);

}  // namespace polygcl
