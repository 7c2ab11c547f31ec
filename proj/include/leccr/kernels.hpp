#pragma once

#include "leccr/dense_matrix.hpp"

namespace leccr::kernels {

// Runtime switch between the serial reference kernels and the OpenMP ones.
// Both paths compute each output row with identical arithmetic order, so
// results are bit-exact regardless of thread count; tests rely on that.
bool parallel_enabled();
void set_parallel(bool on);
int max_threads();

// All matmul kernels accumulate: out += ...; callers zero `out` first.
void matmul_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);  // a*b
void matmul_nt(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);  // a*b^T
void matmul_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);  // a^T*b

// Row-wise softmax with temperature, max-subtracted for stability.
void softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out);
void log_softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out);
// gin += J^T * gout, J the softmax/log-softmax Jacobian. `p` is the forward
// softmax output; for log-softmax the forward log-probs are passed as `logp`.
void softmax_rows_backward(const DenseMatrix& p, const DenseMatrix& gout, double tau,
                           DenseMatrix& gin);
void log_softmax_rows_backward(const DenseMatrix& logp, const DenseMatrix& gout, double tau,
                               DenseMatrix& gin);

// Per-row layer norm: out = gain .* (x - mean) / sqrt(var + eps) + bias.
// gain/bias are 1 x cols.
void layer_norm_rows(const DenseMatrix& x, const DenseMatrix& gain, const DenseMatrix& bias,
                     double eps, DenseMatrix& out);
void layer_norm_rows_backward(const DenseMatrix& x, const DenseMatrix& gain, double eps,
                              const DenseMatrix& gout, DenseMatrix& gx, DenseMatrix& ggain,
                              DenseMatrix& gbias);

// Per-row L2 normalization; rows of exactly zero norm raise input_error.
void l2_normalize_rows(const DenseMatrix& x, DenseMatrix& out);
void l2_normalize_rows_backward(const DenseMatrix& x, const DenseMatrix& y,
                                const DenseMatrix& gout, DenseMatrix& gx);

// Serial reference path, kept callable directly for tests and the benchmark.
namespace serial {
void matmul_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void matmul_nt(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void matmul_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out);
void log_softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out);
void softmax_rows_backward(const DenseMatrix& p, const DenseMatrix& gout, double tau,
                           DenseMatrix& gin);
void log_softmax_rows_backward(const DenseMatrix& logp, const DenseMatrix& gout, double tau,
                               DenseMatrix& gin);
void layer_norm_rows(const DenseMatrix& x, const DenseMatrix& gain, const DenseMatrix& bias,
                     double eps, DenseMatrix& out);
void layer_norm_rows_backward(const DenseMatrix& x, const DenseMatrix& gain, double eps,
                              const DenseMatrix& gout, DenseMatrix& gx, DenseMatrix& ggain,
                              DenseMatrix& gbias);
void l2_normalize_rows(const DenseMatrix& x, DenseMatrix& out);
void l2_normalize_rows_backward(const DenseMatrix& x, const DenseMatrix& y,
                                const DenseMatrix& gout, DenseMatrix& gx);
}  // namespace serial

// OpenMP path; compiles to the serial loops when _OPENMP is absent.
namespace openmp {
void matmul_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void matmul_nt(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void matmul_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out);
void log_softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out);
void softmax_rows_backward(const DenseMatrix& p, const DenseMatrix& gout, double tau,
                           DenseMatrix& gin);
void log_softmax_rows_backward(const DenseMatrix& logp, const DenseMatrix& gout, double tau,
                               DenseMatrix& gin);
void layer_norm_rows(const DenseMatrix& x, const DenseMatrix& gain, const DenseMatrix& bias,
                     double eps, DenseMatrix& out);
void layer_norm_rows_backward(const DenseMatrix& x, const DenseMatrix& gain, double eps,
                              const DenseMatrix& gout, DenseMatrix& gx, DenseMatrix& ggain,
                              DenseMatrix& gbias);
void l2_normalize_rows(const DenseMatrix& x, DenseMatrix& out);
void l2_normalize_rows_backward(const DenseMatrix& x, const DenseMatrix& y,
                                const DenseMatrix& gout, DenseMatrix& gx);
}  // namespace openmp

}  // namespace leccr::kernels
