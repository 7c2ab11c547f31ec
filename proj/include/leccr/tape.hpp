#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "leccr/dense_matrix.hpp"

namespace leccr {

// Handle into a Tape.
struct Var {
  std::uint32_t id = 0xffffffffu;
  bool valid() const { return id != 0xffffffffu; }
};

// Reverse-mode autodiff over matrix-valued nodes. Nodes are appended in
// topological order by construction; backward() walks them in reverse.
// Forward values are computed eagerly through the kernels module, so the
// same graph code serves training, evaluation and gradient checking.
// Node storage is a deque: references returned by value()/grad() stay
// valid while further ops are recorded.
//
// Backward mutates per-node gradient buffers and must be externally
// serialized per tape; forward-built values may be read concurrently.
class Tape {
public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(DenseMatrix value, bool requires_grad = false);
  Var constant_scalar(double v);

  Var matmul(Var a, Var b);     // a*b
  Var matmul_nt(Var a, Var b);  // a*b^T
  Var transpose(Var a);

  Var add(Var a, Var b);
  Var add_n(const std::vector<Var>& xs);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var hadamard(Var a, Var b);

  Var softmax_rows(Var a, double tau);
  Var log_softmax_rows(Var a, double tau);
  enum class Axis { rows, cols };
  Var softmax(Var a, Axis axis, double tau);
  Var layer_norm(Var x, Var gain, Var bias, double eps);
  Var l2_normalize_rows(Var x);

  Var take_row(Var x, std::size_t row);
  Var slice_rows(Var x, std::size_t r0, std::size_t r1);
  Var slice_cols(Var x, std::size_t c0, std::size_t c1);
  Var concat_rows(const std::vector<Var>& xs);
  Var concat_cols(const std::vector<Var>& xs);

  Var row_max(Var x);  // n x 1; ties resolve to the lowest column index
  Var normalize_rows_sum(Var x);  // y = x / rowsum(x)
  Var mean_diag(Var x);
  Var mean_rows(Var x);
  Var sum(Var x);
  // c * sum_ij w_ij * x_ij with w held constant.
  Var weighted_sum(Var x, DenseMatrix w, double c);

  // Seeds d(root)/d(root) = 1 and accumulates gradients into every
  // requires-grad ancestor. root must be 1x1. Gradients are zeroed first.
  void backward(Var root);

  const DenseMatrix& value(Var v) const { return nodes_[v.id].value; }
  const DenseMatrix& grad(Var v) const { return nodes_[v.id].grad; }
  bool requires_grad(Var v) const { return nodes_[v.id].needs_grad; }
  std::size_t node_count() const { return nodes_.size(); }

private:
  struct Node {
    DenseMatrix value;
    DenseMatrix grad;
    std::function<void(Tape&)> back;  // empty for leaves
    bool needs_grad = false;
  };

  Var push(DenseMatrix value, bool needs, std::function<void(Tape&)> back);
  DenseMatrix& grad_buf(Var v) { return nodes_[v.id].grad; }

  std::deque<Node> nodes_;
};

}  // namespace leccr
