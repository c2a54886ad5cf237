#include "polygcl/model.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "polygcl/errors.hpp"

namespace polygcl {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_row_major(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
}

void read_row_major(std::istream& in, Eigen::MatrixXd& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      in.read(reinterpret_cast<char*>(&m(r, c)), sizeof(double));
    }
  }
}

}  // namespace

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kSquare:
      return "square";
    case Activation::kRelu:
      return "relu";
    case Activation::kHalfSquare:
      return "half_square";
  }
  return "square";
}

std::optional<Activation> activation_from_name(std::string_view name) {
  for (const Activation a : {Activation::kSquare, Activation::kRelu, Activation::kHalfSquare}) {
    if (activation_name(a) == name) return a;
  }
  return std::nullopt;
}

EncoderParams init_params(Index f_in, Index hidden, Index out, Activation activation,
                          std::uint64_t seed) {
  if (f_in <= 0 || hidden <= 0 || out <= 0) {
    throw std::invalid_argument("encoder dimensions must be positive");
  }
  EncoderParams p;
  p.activation = activation;
  p.w1.resize(f_in, hidden);
  p.w2.resize(hidden, out);
  Rng rng(derive_seed(seed, "model"));
  glorot_uniform(p.w1, rng);
  glorot_uniform(p.w2, rng);
  return p;
}

Var encode(const std::shared_ptr<const SparseAdjacency>& adjacency, Var x, Var w1,
           Var w2, Activation activation) {
  Var pre = matmul(spmm(adjacency, x), w1);
  Var hidden;
  switch (activation) {
    case Activation::kSquare:
      hidden = square(pre);
      break;
    case Activation::kHalfSquare:
      hidden = scale(square(pre), 0.5);
      break;
    case Activation::kRelu:
      hidden = relu(pre);
      break;
  }
  return matmul(spmm(adjacency, hidden), w2);
}

Eigen::MatrixXd encode(const SparseAdjacency& adjacency, const Eigen::MatrixXd& x,
                       const EncoderParams& params) {
  if (x.cols() != params.in_features()) {
    throw ShapeError("features have " + std::to_string(x.cols()) +
                     " columns, encoder expects " + std::to_string(params.in_features()));
  }
  Tape tape;
  auto adj = std::make_shared<const SparseAdjacency>(adjacency);
  Var z = encode(adj, tape.input(x, Encryption::kEncrypted, "x"),
                 tape.constant(params.w1, "w1"), tape.constant(params.w2, "w2"),
                 params.activation);
  return tape.value(z);
}

void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params) {
  if (params.w1.cols() != params.w2.rows()) {
    throw ShapeError("W1 columns must equal W2 rows");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_u32(out, static_cast<std::uint32_t>(params.in_features()));
  write_u32(out, static_cast<std::uint32_t>(params.hidden()));
  write_u32(out, static_cast<std::uint32_t>(params.out()));
  write_u32(out, static_cast<std::uint32_t>(params.activation));
  write_row_major(out, params.w1);
  write_row_major(out, params.w2);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

EncoderParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  const std::uint32_t f_in = read_u32(in);
  const std::uint32_t hidden = read_u32(in);
  const std::uint32_t out = read_u32(in);
  const std::uint32_t act = read_u32(in);
  if (!in) throw ParseError(path.string() + ": truncated checkpoint header");
  if (act > static_cast<std::uint32_t>(Activation::kHalfSquare)) {
    throw ParseError(path.string() + ": unknown activation code " + std::to_string(act));
  }
  if (f_in == 0 || hidden == 0 || out == 0) {
    throw ParseError(path.string() + ": zero dimension in checkpoint header");
  }
  EncoderParams p;
  p.activation = static_cast<Activation>(act);
  p.w1.resize(f_in, hidden);
  p.w2.resize(hidden, out);
  read_row_major(in, p.w1);
  read_row_major(in, p.w2);
  if (!in) throw ParseError(path.string() + ": truncated checkpoint body");
  in.peek();
  if (!in.eof()) throw ParseError(path.string() + ": trailing bytes after checkpoint body");
  return p;
}

}  // namespace polygcl
