#include "leccr/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "leccr/errors.hpp"

namespace leccr::kernels {

namespace {

std::atomic<bool> g_parallel{
#ifdef _OPENMP
    true
#else
    false
#endif
};

// Row-level workers shared by both paths. The OpenMP kernels distribute
// whole output rows, so per-row arithmetic order never changes.

inline void matmul_nn_row(const double* arow, const double* b, double* orow, std::size_t k,
                          std::size_t n) {
  for (std::size_t kk = 0; kk < k; ++kk) {
    const double av = arow[kk];
    const double* brow = b + kk * n;
    for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
  }
}

inline void matmul_nt_row(const double* arow, const double* b, double* orow, std::size_t k,
                          std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double* brow = b + j * k;
    double acc = 0.0;
    for (std::size_t kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
    orow[j] += acc;
  }
}

// out row `kk` of a^T*b: sum_i a(i,kk) * b(i,:).
inline void matmul_tn_row(const double* a, const double* b, double* orow, std::size_t m,
                          std::size_t ka, std::size_t n, std::size_t kk) {
  for (std::size_t i = 0; i < m; ++i) {
    const double av = a[i * ka + kk];
    const double* brow = b + i * n;
    for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
  }
}

inline void softmax_row(const double* x, double* p, std::size_t n, double tau) {
  double m = x[0];
  for (std::size_t j = 1; j < n; ++j) m = x[j] > m ? x[j] : m;
  double z = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = std::exp((x[j] - m) / tau);
    z += p[j];
  }
  const double inv = 1.0 / z;
  for (std::size_t j = 0; j < n; ++j) p[j] *= inv;
}

inline void log_softmax_row(const double* x, double* y, std::size_t n, double tau) {
  double m = x[0];
  for (std::size_t j = 1; j < n; ++j) m = x[j] > m ? x[j] : m;
  double z = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = (x[j] - m) / tau;
    z += std::exp(y[j]);
  }
  const double lz = std::log(z);
  for (std::size_t j = 0; j < n; ++j) y[j] -= lz;
}

inline void softmax_backward_row(const double* p, const double* g, double* gi, std::size_t n,
                                 double tau) {
  double dot = 0.0;
  for (std::size_t j = 0; j < n; ++j) dot += g[j] * p[j];
  const double inv_tau = 1.0 / tau;
  for (std::size_t j = 0; j < n; ++j) gi[j] += inv_tau * p[j] * (g[j] - dot);
}

inline void log_softmax_backward_row(const double* logp, const double* g, double* gi,
                                     std::size_t n, double tau) {
  double gsum = 0.0;
  for (std::size_t j = 0; j < n; ++j) gsum += g[j];
  const double inv_tau = 1.0 / tau;
  for (std::size_t j = 0; j < n; ++j) gi[j] += inv_tau * (g[j] - std::exp(logp[j]) * gsum);
}

inline void layer_norm_row(const double* x, const double* gain, const double* bias, double eps,
                           double* y, std::size_t n) {
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) mean += x[j];
  mean /= double(n);
  double var = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = x[j] - mean;
    var += c * c;
  }
  var /= double(n);
  const double s = 1.0 / std::sqrt(var + eps);
  for (std::size_t j = 0; j < n; ++j) y[j] = gain[j] * (x[j] - mean) * s + bias[j];
}

inline void layer_norm_backward_row(const double* x, const double* gain, double eps,
                                    const double* g, double* gx, std::size_t n) {
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) mean += x[j];
  mean /= double(n);
  double var = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = x[j] - mean;
    var += c * c;
  }
  var /= double(n);
  const double s = 1.0 / std::sqrt(var + eps);

  // ghat = dL/dxhat; dvar and dmean follow the usual layer-norm algebra.
  double ghat_sum = 0.0, ghat_dot_c = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double gh = g[j] * gain[j];
    ghat_sum += gh;
    ghat_dot_c += gh * (x[j] - mean);
  }
  const double dvar = -0.5 * ghat_dot_c * s * s * s;
  const double dmean = -s * ghat_sum;
  for (std::size_t j = 0; j < n; ++j) {
    const double gh = g[j] * gain[j];
    gx[j] += gh * s + dvar * 2.0 * (x[j] - mean) / double(n) + dmean / double(n);
  }
}

inline void l2_normalize_row(const double* x, double* y, std::size_t n) {
  double sq = 0.0;
  for (std::size_t j = 0; j < n; ++j) sq += x[j] * x[j];
  if (sq == 0.0) throw input_error("cannot L2-normalize a zero-norm row");
  const double inv = 1.0 / std::sqrt(sq);
  for (std::size_t j = 0; j < n; ++j) y[j] = x[j] * inv;
}

inline void l2_normalize_backward_row(const double* x, const double* y, const double* g,
                                      double* gx, std::size_t n) {
  double sq = 0.0, dot = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sq += x[j] * x[j];
    dot += g[j] * y[j];
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (std::size_t j = 0; j < n; ++j) gx[j] += (g[j] - dot * y[j]) * inv;
}

void check_matmul_nn(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& out) {
  if (a.cols() != b.rows() || out.rows() != a.rows() || out.cols() != b.cols())
    throw shape_error("matmul_nn shape mismatch");
}
void check_matmul_nt(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& out) {
  if (a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != b.rows())
    throw shape_error("matmul_nt shape mismatch");
}
void check_matmul_tn(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& out) {
  if (a.rows() != b.rows() || out.rows() != a.cols() || out.cols() != b.cols())
    throw shape_error("matmul_tn shape mismatch");
}

}  // namespace

bool parallel_enabled() { return g_parallel.load(); }
void set_parallel(bool on) { g_parallel.store(on); }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

void matmul_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  check_matmul_nn(a, b, out);
  for (std::size_t i = 0; i < a.rows(); ++i)
    matmul_nn_row(a.row(i), b.data(), out.row(i), a.cols(), b.cols());
}

void matmul_nt(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  check_matmul_nt(a, b, out);
  for (std::size_t i = 0; i < a.rows(); ++i)
    matmul_nt_row(a.row(i), b.data(), out.row(i), a.cols(), b.rows());
}

void matmul_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  check_matmul_tn(a, b, out);
  for (std::size_t kk = 0; kk < a.cols(); ++kk)
    matmul_tn_row(a.data(), b.data(), out.row(kk), a.rows(), a.cols(), b.cols(), kk);
}

void softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out) {
  for (std::size_t i = 0; i < x.rows(); ++i) softmax_row(x.row(i), out.row(i), x.cols(), tau);
}

void log_softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out) {
  for (std::size_t i = 0; i < x.rows(); ++i) log_softmax_row(x.row(i), out.row(i), x.cols(), tau);
}

void softmax_rows_backward(const DenseMatrix& p, const DenseMatrix& gout, double tau,
                           DenseMatrix& gin) {
  for (std::size_t i = 0; i < p.rows(); ++i)
    softmax_backward_row(p.row(i), gout.row(i), gin.row(i), p.cols(), tau);
}

void log_softmax_rows_backward(const DenseMatrix& logp, const DenseMatrix& gout, double tau,
                               DenseMatrix& gin) {
  for (std::size_t i = 0; i < logp.rows(); ++i)
    log_softmax_backward_row(logp.row(i), gout.row(i), gin.row(i), logp.cols(), tau);
}

void layer_norm_rows(const DenseMatrix& x, const DenseMatrix& gain, const DenseMatrix& bias,
                     double eps, DenseMatrix& out) {
  for (std::size_t i = 0; i < x.rows(); ++i)
    layer_norm_row(x.row(i), gain.data(), bias.data(), eps, out.row(i), x.cols());
}

void layer_norm_rows_backward(const DenseMatrix& x, const DenseMatrix& gain, double eps,
                              const DenseMatrix& gout, DenseMatrix& gx, DenseMatrix& ggain,
                              DenseMatrix& gbias) {
  const std::size_t n = x.cols();
  for (std::size_t i = 0; i < x.rows(); ++i)
    layer_norm_backward_row(x.row(i), gain.data(), eps, gout.row(i), gx.row(i), n);
  // gain/bias reduction over rows, fixed order.
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* xr = x.row(i);
    const double* gr = gout.row(i);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += xr[j];
    mean /= double(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double c = xr[j] - mean;
      var += c * c;
    }
    var /= double(n);
    const double s = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      ggain(0, j) += gr[j] * (xr[j] - mean) * s;
      gbias(0, j) += gr[j];
    }
  }
}

void l2_normalize_rows(const DenseMatrix& x, DenseMatrix& out) {
  for (std::size_t i = 0; i < x.rows(); ++i) l2_normalize_row(x.row(i), out.row(i), x.cols());
}

void l2_normalize_rows_backward(const DenseMatrix& x, const DenseMatrix& y,
                                const DenseMatrix& gout, DenseMatrix& gx) {
  for (std::size_t i = 0; i < x.rows(); ++i)
    l2_normalize_backward_row(x.row(i), y.row(i), gout.row(i), gx.row(i), x.cols());
}

}  // namespace serial

namespace openmp {

// Parallel loops only pay off past a size threshold; below it the serial
// loop runs inside the same function.
constexpr std::size_t kMinWork = 16 * 1024;

void matmul_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  check_matmul_nn(a, b, out);
  const std::ptrdiff_t m = std::ptrdiff_t(a.rows());
#pragma omp parallel for schedule(static) if (a.rows() * a.cols() * b.cols() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    matmul_nn_row(a.row(std::size_t(i)), b.data(), out.row(std::size_t(i)), a.cols(), b.cols());
}

void matmul_nt(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  check_matmul_nt(a, b, out);
  const std::ptrdiff_t m = std::ptrdiff_t(a.rows());
#pragma omp parallel for schedule(static) if (a.rows() * a.cols() * b.rows() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    matmul_nt_row(a.row(std::size_t(i)), b.data(), out.row(std::size_t(i)), a.cols(), b.rows());
}

void matmul_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  check_matmul_tn(a, b, out);
  const std::ptrdiff_t k = std::ptrdiff_t(a.cols());
#pragma omp parallel for schedule(static) if (a.rows() * a.cols() * b.cols() > kMinWork)
  for (std::ptrdiff_t kk = 0; kk < k; ++kk)
    matmul_tn_row(a.data(), b.data(), out.row(std::size_t(kk)), a.rows(), a.cols(), b.cols(),
                  std::size_t(kk));
}

void softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out) {
  const std::ptrdiff_t m = std::ptrdiff_t(x.rows());
#pragma omp parallel for schedule(static) if (x.size() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    softmax_row(x.row(std::size_t(i)), out.row(std::size_t(i)), x.cols(), tau);
}

void log_softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out) {
  const std::ptrdiff_t m = std::ptrdiff_t(x.rows());
#pragma omp parallel for schedule(static) if (x.size() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    log_softmax_row(x.row(std::size_t(i)), out.row(std::size_t(i)), x.cols(), tau);
}

void softmax_rows_backward(const DenseMatrix& p, const DenseMatrix& gout, double tau,
                           DenseMatrix& gin) {
  const std::ptrdiff_t m = std::ptrdiff_t(p.rows());
#pragma omp parallel for schedule(static) if (p.size() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    softmax_backward_row(p.row(std::size_t(i)), gout.row(std::size_t(i)), gin.row(std::size_t(i)),
                         p.cols(), tau);
}

void log_softmax_rows_backward(const DenseMatrix& logp, const DenseMatrix& gout, double tau,
                               DenseMatrix& gin) {
  const std::ptrdiff_t m = std::ptrdiff_t(logp.rows());
#pragma omp parallel for schedule(static) if (logp.size() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    log_softmax_backward_row(logp.row(std::size_t(i)), gout.row(std::size_t(i)),
                             gin.row(std::size_t(i)), logp.cols(), tau);
}

void layer_norm_rows(const DenseMatrix& x, const DenseMatrix& gain, const DenseMatrix& bias,
                     double eps, DenseMatrix& out) {
  const std::ptrdiff_t m = std::ptrdiff_t(x.rows());
#pragma omp parallel for schedule(static) if (x.size() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    layer_norm_row(x.row(std::size_t(i)), gain.data(), bias.data(), eps, out.row(std::size_t(i)),
                   x.cols());
}

void layer_norm_rows_backward(const DenseMatrix& x, const DenseMatrix& gain, double eps,
                              const DenseMatrix& gout, DenseMatrix& gx, DenseMatrix& ggain,
                              DenseMatrix& gbias) {
  const std::ptrdiff_t m = std::ptrdiff_t(x.rows());
#pragma omp parallel for schedule(static) if (x.size() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    layer_norm_backward_row(x.row(std::size_t(i)), gain.data(), eps, gout.row(std::size_t(i)),
                            gx.row(std::size_t(i)), x.cols());
  // The gain/bias reduction stays serial so accumulation order matches the
  // reference kernel exactly.
  const std::size_t n = x.cols();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* xr = x.row(i);
    const double* gr = gout.row(i);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += xr[j];
    mean /= double(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double c = xr[j] - mean;
      var += c * c;
    }
    var /= double(n);
    const double s = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      ggain(0, j) += gr[j] * (xr[j] - mean) * s;
      gbias(0, j) += gr[j];
    }
  }
}

void l2_normalize_rows(const DenseMatrix& x, DenseMatrix& out) {
  // input_error must escape, so rows are validated before the parallel loop.
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) sq += x(i, j) * x(i, j);
    if (sq == 0.0) throw input_error("cannot L2-normalize a zero-norm row");
  }
  const std::ptrdiff_t m = std::ptrdiff_t(x.rows());
#pragma omp parallel for schedule(static) if (x.size() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    l2_normalize_row(x.row(std::size_t(i)), out.row(std::size_t(i)), x.cols());
}

void l2_normalize_rows_backward(const DenseMatrix& x, const DenseMatrix& y,
                                const DenseMatrix& gout, DenseMatrix& gx) {
  const std::ptrdiff_t m = std::ptrdiff_t(x.rows());
#pragma omp parallel for schedule(static) if (x.size() > kMinWork)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    l2_normalize_backward_row(x.row(std::size_t(i)), y.row(std::size_t(i)),
                              gout.row(std::size_t(i)), gx.row(std::size_t(i)), x.cols());
}

}  // namespace openmp

#define LECCR_DISPATCH(fn, ...)      \
  do {                               \
    if (parallel_enabled())          \
      openmp::fn(__VA_ARGS__);       \
    else                             \
      serial::fn(__VA_ARGS__);       \
  } while (0)

void matmul_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  LECCR_DISPATCH(matmul_nn, a, b, out);
}
void matmul_nt(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  LECCR_DISPATCH(matmul_nt, a, b, out);
}
void matmul_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  LECCR_DISPATCH(matmul_tn, a, b, out);
}
void softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out) {
  LECCR_DISPATCH(softmax_rows, x, tau, out);
}
void log_softmax_rows(const DenseMatrix& x, double tau, DenseMatrix& out) {
  LECCR_DISPATCH(log_softmax_rows, x, tau, out);
}
void softmax_rows_backward(const DenseMatrix& p, const DenseMatrix& gout, double tau,
                           DenseMatrix& gin) {
  LECCR_DISPATCH(softmax_rows_backward, p, gout, tau, gin);
}
void log_softmax_rows_backward(const DenseMatrix& logp, const DenseMatrix& gout, double tau,
                               DenseMatrix& gin) {
  LECCR_DISPATCH(log_softmax_rows_backward, logp, gout, tau, gin);
}
void layer_norm_rows(const DenseMatrix& x, const DenseMatrix& gain, const DenseMatrix& bias,
                     double eps, DenseMatrix& out) {
  LECCR_DISPATCH(layer_norm_rows, x, gain, bias, eps, out);
}
void layer_norm_rows_backward(const DenseMatrix& x, const DenseMatrix& gain, double eps,
                              const DenseMatrix& gout, DenseMatrix& gx, DenseMatrix& ggain,
                              DenseMatrix& gbias) {
  LECCR_DISPATCH(layer_norm_rows_backward, x, gain, eps, gout, gx, ggain, gbias);
}
void l2_normalize_rows(const DenseMatrix& x, DenseMatrix& out) {
  LECCR_DISPATCH(l2_normalize_rows, x, out);
}
void l2_normalize_rows_backward(const DenseMatrix& x, const DenseMatrix& y,
                                const DenseMatrix& gout, DenseMatrix& gx) {
  LECCR_DISPATCH(l2_normalize_rows_backward, x, y, gout, gx);
}

#undef LECCR_DISPATCH

}  // namespace leccr::kernels
