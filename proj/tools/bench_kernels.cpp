// Times the serial reference kernels against the OpenMP ones and checks
// that both produce bit-identical results on the same inputs.
//
//   bench_kernels [--reps N] [--threads T]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "leccr/dense_matrix.hpp"
#include "leccr/kernels.hpp"
#include "leccr/rng.hpp"

using namespace leccr;

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_reps(int reps, F&& fn) {
  fn();  // warm up
  const double t0 = now_s();
  for (int r = 0; r < reps; ++r) fn();
  return (now_s() - t0) / reps;
}

bool bits_equal(const DenseMatrix& a, const DenseMatrix& b) {
  return a.same_shape(b) &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct Case {
  std::string name;
  std::size_t m, k, n;
};

}  // namespace

int main(int argc, char** argv) {
  int reps = 20;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--reps" && i + 1 < argc) reps = std::atoi(argv[++i]);
#ifdef _OPENMP
    if (std::string(argv[i]) == "--threads" && i + 1 < argc)
      omp_set_num_threads(std::atoi(argv[++i]));
#endif
  }

  std::printf("threads available: %d, reps: %d\n", kernels::max_threads(), reps);
  std::printf("%-26s %12s %12s %8s %s\n", "kernel", "serial (ms)", "openmp (ms)", "speedup",
              "bit-exact");

  Rng rng(42);
  const std::vector<Case> cases = {
      {"matmul_nn 512x512x512", 512, 512, 512},
      {"matmul_nt 512x512x512", 512, 512, 512},
      {"matmul_nn 128x128x128", 128, 128, 128},
      {"matmul_nn 24x128x128 (step)", 24, 128, 128},
  };

  for (const auto& c : cases) {
    DenseMatrix a = DenseMatrix::gaussian(c.m, c.k, 1.0, rng);
    const bool nt = c.name.find("_nt") != std::string::npos;
    DenseMatrix b = nt ? DenseMatrix::gaussian(c.n, c.k, 1.0, rng)
                       : DenseMatrix::gaussian(c.k, c.n, 1.0, rng);
    DenseMatrix out_s(c.m, c.n), out_p(c.m, c.n);
    auto run_s = [&] {
      out_s.set_zero();
      nt ? kernels::serial::matmul_nt(a, b, out_s) : kernels::serial::matmul_nn(a, b, out_s);
    };
    auto run_p = [&] {
      out_p.set_zero();
      nt ? kernels::openmp::matmul_nt(a, b, out_p) : kernels::openmp::matmul_nn(a, b, out_p);
    };
    const double ts = time_reps(reps, run_s);
    const double tp = time_reps(reps, run_p);
    std::printf("%-26s %12.3f %12.3f %7.2fx %s\n", c.name.c_str(), ts * 1e3, tp * 1e3, ts / tp,
                bits_equal(out_s, out_p) ? "yes" : "NO");
  }

  {
    const std::size_t rows = 4096, cols = 256;
    DenseMatrix x = DenseMatrix::gaussian(rows, cols, 1.0, rng);
    DenseMatrix out_s(rows, cols), out_p(rows, cols);
    const double ts =
        time_reps(reps, [&] { kernels::serial::softmax_rows(x, 0.5, out_s); });
    const double tp =
        time_reps(reps, [&] { kernels::openmp::softmax_rows(x, 0.5, out_p); });
    std::printf("%-26s %12.3f %12.3f %7.2fx %s\n", "softmax_rows 4096x256", ts * 1e3, tp * 1e3,
                ts / tp, bits_equal(out_s, out_p) ? "yes" : "NO");
  }

  {
    const std::size_t rows = 4096, cols = 256;
    DenseMatrix x = DenseMatrix::gaussian(rows, cols, 1.0, rng);
    DenseMatrix gain = DenseMatrix::filled(1, cols, 1.0);
    DenseMatrix bias(1, cols);
    DenseMatrix out_s(rows, cols), out_p(rows, cols);
    const double ts = time_reps(
        reps, [&] { kernels::serial::layer_norm_rows(x, gain, bias, 1e-5, out_s); });
    const double tp = time_reps(
        reps, [&] { kernels::openmp::layer_norm_rows(x, gain, bias, 1e-5, out_p); });
    std::printf("%-26s %12.3f %12.3f %7.2fx %s\n", "layer_norm 4096x256", ts * 1e3, tp * 1e3,
                ts / tp, bits_equal(out_s, out_p) ? "yes" : "NO");
  }

  return 0;
}
