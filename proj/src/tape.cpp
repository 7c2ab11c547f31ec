#include "leccr/tape.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "leccr/errors.hpp"
#include "leccr/kernels.hpp"

namespace leccr {

Var Tape::push(DenseMatrix value, bool needs, std::function<void(Tape&)> back) {
  Node n;
  n.value = std::move(value);
  // Gradient buffers are allocated by backward(), only for reachable
  // needs-grad nodes; forward-only graphs never pay for them.
  n.back = std::move(back);
  n.needs_grad = needs;
  nodes_.push_back(std::move(n));
  return Var{std::uint32_t(nodes_.size() - 1)};
}

Var Tape::leaf(DenseMatrix value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

Var Tape::constant_scalar(double v) {
  DenseMatrix m(1, 1);
  m(0, 0) = v;
  return push(std::move(m), false, nullptr);
}

Var Tape::matmul(Var a, Var b) {
  const DenseMatrix& av = value(a);
  const DenseMatrix& bv = value(b);
  if (av.cols() != bv.rows()) throw shape_error("matmul: inner dimensions differ");
  DenseMatrix o(av.rows(), bv.cols());
  kernels::matmul_nn(av, bv, o);
  const bool req = requires_grad(a) || requires_grad(b);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a, b](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      if (t.requires_grad(a)) kernels::matmul_nt(g, t.value(b), t.grad_buf(a));
      if (t.requires_grad(b)) kernels::matmul_tn(t.value(a), g, t.grad_buf(b));
    };
  return out;
}

Var Tape::matmul_nt(Var a, Var b) {
  const DenseMatrix& av = value(a);
  const DenseMatrix& bv = value(b);
  if (av.cols() != bv.cols()) throw shape_error("matmul_nt: column counts differ");
  DenseMatrix o(av.rows(), bv.rows());
  kernels::matmul_nt(av, bv, o);
  const bool req = requires_grad(a) || requires_grad(b);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a, b](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      if (t.requires_grad(a)) kernels::matmul_nn(g, t.value(b), t.grad_buf(a));
      if (t.requires_grad(b)) kernels::matmul_tn(g, t.value(a), t.grad_buf(b));
    };
  return out;
}

Var Tape::transpose(Var a) {
  const DenseMatrix& av = value(a);
  DenseMatrix o(av.cols(), av.rows());
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < av.cols(); ++j) o(j, i) = av(i, j);
  const bool req = requires_grad(a);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      DenseMatrix& ga = t.grad_buf(a);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) ga(j, i) += g(i, j);
    };
  return out;
}

Var Tape::add(Var a, Var b) {
  const DenseMatrix& av = value(a);
  const DenseMatrix& bv = value(b);
  if (!av.same_shape(bv)) throw shape_error("add: shape mismatch");
  DenseMatrix o(av.rows(), av.cols());
  for (std::size_t i = 0; i < o.size(); ++i) o.data()[i] = av.data()[i] + bv.data()[i];
  const bool req = requires_grad(a) || requires_grad(b);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a, b](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      if (t.requires_grad(a)) {
        DenseMatrix& ga = t.grad_buf(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += g.data()[i];
      }
      if (t.requires_grad(b)) {
        DenseMatrix& gb = t.grad_buf(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb.data()[i] += g.data()[i];
      }
    };
  return out;
}

Var Tape::add_n(const std::vector<Var>& xs) {
  if (xs.empty()) throw input_error("add_n: empty operand list");
  const DenseMatrix& first = value(xs[0]);
  DenseMatrix o(first.rows(), first.cols());
  bool req = false;
  for (Var x : xs) {
    const DenseMatrix& xv = value(x);
    if (!xv.same_shape(first)) throw shape_error("add_n: shape mismatch");
    for (std::size_t i = 0; i < o.size(); ++i) o.data()[i] += xv.data()[i];
    req = req || requires_grad(x);
  }
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, xs](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      for (Var x : xs) {
        if (!t.requires_grad(x)) continue;
        DenseMatrix& gx = t.grad_buf(x);
        for (std::size_t i = 0; i < g.size(); ++i) gx.data()[i] += g.data()[i];
      }
    };
  return out;
}

Var Tape::scale(Var a, double c) {
  const DenseMatrix& av = value(a);
  DenseMatrix o(av.rows(), av.cols());
  for (std::size_t i = 0; i < o.size(); ++i) o.data()[i] = c * av.data()[i];
  const bool req = requires_grad(a);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a, c](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      DenseMatrix& ga = t.grad_buf(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += c * g.data()[i];
    };
  return out;
}

Var Tape::add_scalar(Var a, double c) {
  const DenseMatrix& av = value(a);
  DenseMatrix o(av.rows(), av.cols());
  for (std::size_t i = 0; i < o.size(); ++i) o.data()[i] = av.data()[i] + c;
  const bool req = requires_grad(a);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      DenseMatrix& ga = t.grad_buf(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += g.data()[i];
    };
  return out;
}

Var Tape::hadamard(Var a, Var b) {
  const DenseMatrix& av = value(a);
  const DenseMatrix& bv = value(b);
  if (!av.same_shape(bv)) throw shape_error("hadamard: shape mismatch");
  DenseMatrix o(av.rows(), av.cols());
  for (std::size_t i = 0; i < o.size(); ++i) o.data()[i] = av.data()[i] * bv.data()[i];
  const bool req = requires_grad(a) || requires_grad(b);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a, b](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      if (t.requires_grad(a)) {
        DenseMatrix& ga = t.grad_buf(a);
        const DenseMatrix& bv2 = t.value(b);
        for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += g.data()[i] * bv2.data()[i];
      }
      if (t.requires_grad(b)) {
        DenseMatrix& gb = t.grad_buf(b);
        const DenseMatrix& av2 = t.value(a);
        for (std::size_t i = 0; i < g.size(); ++i) gb.data()[i] += g.data()[i] * av2.data()[i];
      }
    };
  return out;
}

Var Tape::softmax_rows(Var a, double tau) {
  if (!(tau > 0.0)) throw config_error("softmax temperature must be positive");
  const DenseMatrix& av = value(a);
  if (!av.all_finite()) throw input_error("softmax: non-finite input");
  DenseMatrix o(av.rows(), av.cols());
  kernels::softmax_rows(av, tau, o);
  const bool req = requires_grad(a);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a, tau](Tape& t) {
      kernels::softmax_rows_backward(t.value(out), t.grad(out), tau, t.grad_buf(a));
    };
  return out;
}

Var Tape::softmax(Var a, Axis axis, double tau) {
  if (axis == Axis::rows) return softmax_rows(a, tau);
  return transpose(softmax_rows(transpose(a), tau));
}

Var Tape::log_softmax_rows(Var a, double tau) {
  if (!(tau > 0.0)) throw config_error("softmax temperature must be positive");
  const DenseMatrix& av = value(a);
  if (!av.all_finite()) throw input_error("log_softmax: non-finite input");
  DenseMatrix o(av.rows(), av.cols());
  kernels::log_softmax_rows(av, tau, o);
  const bool req = requires_grad(a);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, a, tau](Tape& t) {
      kernels::log_softmax_rows_backward(t.value(out), t.grad(out), tau, t.grad_buf(a));
    };
  return out;
}

Var Tape::layer_norm(Var x, Var gain, Var bias, double eps) {
  if (!(eps > 0.0)) throw config_error("layer_norm epsilon must be positive");
  const DenseMatrix& xv = value(x);
  const DenseMatrix& gv = value(gain);
  const DenseMatrix& bv = value(bias);
  if (gv.rows() != 1 || bv.rows() != 1 || gv.cols() != xv.cols() || bv.cols() != xv.cols())
    throw shape_error("layer_norm: gain/bias must be 1 x cols");
  DenseMatrix o(xv.rows(), xv.cols());
  kernels::layer_norm_rows(xv, gv, bv, eps, o);
  const bool req = requires_grad(x) || requires_grad(gain) || requires_grad(bias);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x, gain, bias, eps](Tape& t) {
      // gx/ggain/gbias write into scratch when a parent does not need grads.
      const DenseMatrix& xv2 = t.value(x);
      DenseMatrix scratch_x, scratch_g, scratch_b;
      DenseMatrix* gx = &scratch_x;
      DenseMatrix* gg = &scratch_g;
      DenseMatrix* gb = &scratch_b;
      if (t.requires_grad(x))
        gx = &t.grad_buf(x);
      else
        scratch_x = DenseMatrix(xv2.rows(), xv2.cols());
      if (t.requires_grad(gain))
        gg = &t.grad_buf(gain);
      else
        scratch_g = DenseMatrix(1, xv2.cols());
      if (t.requires_grad(bias))
        gb = &t.grad_buf(bias);
      else
        scratch_b = DenseMatrix(1, xv2.cols());
      kernels::layer_norm_rows_backward(xv2, t.value(gain), eps, t.grad(out), *gx, *gg, *gb);
    };
  return out;
}

Var Tape::l2_normalize_rows(Var x) {
  const DenseMatrix& xv = value(x);
  DenseMatrix o(xv.rows(), xv.cols());
  kernels::l2_normalize_rows(xv, o);
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x](Tape& t) {
      kernels::l2_normalize_rows_backward(t.value(x), t.value(out), t.grad(out), t.grad_buf(x));
    };
  return out;
}

Var Tape::take_row(Var x, std::size_t row) {
  const DenseMatrix& xv = value(x);
  if (row >= xv.rows()) throw shape_error("take_row: row out of range");
  return slice_rows(x, row, row + 1);
}

Var Tape::slice_rows(Var x, std::size_t r0, std::size_t r1) {
  const DenseMatrix& xv = value(x);
  if (r0 >= r1 || r1 > xv.rows()) throw shape_error("slice_rows: bad range");
  DenseMatrix o(r1 - r0, xv.cols());
  for (std::size_t i = r0; i < r1; ++i)
    for (std::size_t j = 0; j < xv.cols(); ++j) o(i - r0, j) = xv(i, j);
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x, r0](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      DenseMatrix& gx = t.grad_buf(x);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gx(r0 + i, j) += g(i, j);
    };
  return out;
}

Var Tape::slice_cols(Var x, std::size_t c0, std::size_t c1) {
  const DenseMatrix& xv = value(x);
  if (c0 >= c1 || c1 > xv.cols()) throw shape_error("slice_cols: bad range");
  DenseMatrix o(xv.rows(), c1 - c0);
  for (std::size_t i = 0; i < xv.rows(); ++i)
    for (std::size_t j = c0; j < c1; ++j) o(i, j - c0) = xv(i, j);
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x, c0](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      DenseMatrix& gx = t.grad_buf(x);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gx(i, c0 + j) += g(i, j);
    };
  return out;
}

Var Tape::concat_rows(const std::vector<Var>& xs) {
  if (xs.empty()) throw input_error("concat_rows: empty operand list");
  std::size_t rows = 0;
  const std::size_t cols = value(xs[0]).cols();
  bool req = false;
  for (Var x : xs) {
    if (value(x).cols() != cols) throw shape_error("concat_rows: column mismatch");
    rows += value(x).rows();
    req = req || requires_grad(x);
  }
  DenseMatrix o(rows, cols);
  std::size_t r = 0;
  for (Var x : xs) {
    const DenseMatrix& xv = value(x);
    for (std::size_t i = 0; i < xv.rows(); ++i, ++r)
      for (std::size_t j = 0; j < cols; ++j) o(r, j) = xv(i, j);
  }
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, xs](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      std::size_t r = 0;
      for (Var x : xs) {
        const std::size_t n = t.value(x).rows();
        if (t.requires_grad(x)) {
          DenseMatrix& gx = t.grad_buf(x);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) gx(i, j) += g(r + i, j);
        }
        r += n;
      }
    };
  return out;
}

Var Tape::concat_cols(const std::vector<Var>& xs) {
  if (xs.empty()) throw input_error("concat_cols: empty operand list");
  std::size_t cols = 0;
  const std::size_t rows = value(xs[0]).rows();
  bool req = false;
  for (Var x : xs) {
    if (value(x).rows() != rows) throw shape_error("concat_cols: row mismatch");
    cols += value(x).cols();
    req = req || requires_grad(x);
  }
  DenseMatrix o(rows, cols);
  std::size_t c = 0;
  for (Var x : xs) {
    const DenseMatrix& xv = value(x);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < xv.cols(); ++j) o(i, c + j) = xv(i, j);
    c += xv.cols();
  }
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, xs](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      std::size_t c = 0;
      for (Var x : xs) {
        const std::size_t n = t.value(x).cols();
        if (t.requires_grad(x)) {
          DenseMatrix& gx = t.grad_buf(x);
          for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < n; ++j) gx(i, j) += g(i, c + j);
        }
        c += n;
      }
    };
  return out;
}

Var Tape::row_max(Var x) {
  const DenseMatrix& xv = value(x);
  if (xv.cols() == 0) throw shape_error("row_max: empty rows");
  DenseMatrix o(xv.rows(), 1);
  std::vector<std::size_t> arg(xv.rows(), 0);
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < xv.cols(); ++j)
      if (xv(i, j) > xv(i, best)) best = j;
    arg[i] = best;
    o(i, 0) = xv(i, best);
  }
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x, arg](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      DenseMatrix& gx = t.grad_buf(x);
      for (std::size_t i = 0; i < g.rows(); ++i) gx(i, arg[i]) += g(i, 0);
    };
  return out;
}

Var Tape::normalize_rows_sum(Var x) {
  const DenseMatrix& xv = value(x);
  DenseMatrix o(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < xv.cols(); ++j) s += xv(i, j);
    if (s == 0.0) throw input_error("normalize_rows_sum: zero row sum");
    for (std::size_t j = 0; j < xv.cols(); ++j) o(i, j) = xv(i, j) / s;
  }
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      const DenseMatrix& xv2 = t.value(x);
      const DenseMatrix& y = t.value(out);
      DenseMatrix& gx = t.grad_buf(x);
      for (std::size_t i = 0; i < xv2.rows(); ++i) {
        double s = 0.0, dot = 0.0;
        for (std::size_t j = 0; j < xv2.cols(); ++j) {
          s += xv2(i, j);
          dot += g(i, j) * y(i, j);
        }
        for (std::size_t j = 0; j < xv2.cols(); ++j) gx(i, j) += (g(i, j) - dot) / s;
      }
    };
  return out;
}

Var Tape::mean_diag(Var x) {
  const DenseMatrix& xv = value(x);
  if (xv.rows() != xv.cols()) throw shape_error("mean_diag: matrix must be square");
  const std::size_t n = xv.rows();
  DenseMatrix o(1, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += xv(i, i);
  o(0, 0) = acc / double(n);
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x, n](Tape& t) {
      const double g = t.grad(out)(0, 0) / double(n);
      DenseMatrix& gx = t.grad_buf(x);
      for (std::size_t i = 0; i < n; ++i) gx(i, i) += g;
    };
  return out;
}

Var Tape::mean_rows(Var x) {
  const DenseMatrix& xv = value(x);
  const std::size_t n = xv.rows();
  DenseMatrix o(1, xv.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < xv.cols(); ++j) o(0, j) += xv(i, j);
  for (std::size_t j = 0; j < xv.cols(); ++j) o(0, j) /= double(n);
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x, n](Tape& t) {
      const DenseMatrix& g = t.grad(out);
      DenseMatrix& gx = t.grad_buf(x);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gx(i, j) += g(0, j) / double(n);
    };
  return out;
}

Var Tape::sum(Var x) {
  const DenseMatrix& xv = value(x);
  DenseMatrix o(1, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv.data()[i];
  o(0, 0) = acc;
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req)
    nodes_[out.id].back = [out, x](Tape& t) {
      const double g = t.grad(out)(0, 0);
      DenseMatrix& gx = t.grad_buf(x);
      for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += g;
    };
  return out;
}

Var Tape::weighted_sum(Var x, DenseMatrix w, double c) {
  const DenseMatrix& xv = value(x);
  if (!xv.same_shape(w)) throw shape_error("weighted_sum: shape mismatch");
  DenseMatrix o(1, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += w.data()[i] * xv.data()[i];
  o(0, 0) = c * acc;
  const bool req = requires_grad(x);
  Var out = push(std::move(o), req, nullptr);
  if (req) {
    auto wp = std::make_shared<DenseMatrix>(std::move(w));
    nodes_[out.id].back = [out, x, wp, c](Tape& t) {
      const double g = c * t.grad(out)(0, 0);
      DenseMatrix& gx = t.grad_buf(x);
      for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += g * wp->data()[i];
    };
  }
  return out;
}

void Tape::backward(Var root) {
  const DenseMatrix& rv = value(root);
  if (rv.rows() != 1 || rv.cols() != 1) throw shape_error("backward root must be 1x1");
  if (!requires_grad(root)) return;
  for (std::uint32_t i = 0; i <= root.id; ++i) {
    Node& n = nodes_[i];
    if (!n.needs_grad) continue;
    if (n.grad.size() == 0)
      n.grad = DenseMatrix(n.value.rows(), n.value.cols());
    else
      n.grad.set_zero();
  }
  nodes_[root.id].grad(0, 0) = 1.0;
  for (std::uint32_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.needs_grad && n.back) n.back(*this);
  }
}

}  // namespace leccr
