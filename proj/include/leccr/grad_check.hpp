#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "leccr/param_store.hpp"

namespace leccr {

struct GradCheckBlock {
  std::string name;
  double max_rel_err = 0.0;
  std::size_t entries_checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double max_rel_err = 0.0;
  double tolerance = 1e-4;
  bool deterministic = true;
  bool passed() const { return deterministic && max_rel_err < tolerance; }
};

// Scalar loss over the store's current values. When `grads` is non-null the
// callee must also fill one gradient matrix per store entry (zeros for
// non-trainable slots are fine; they are never checked).
using LossFn = std::function<double(const ParamStore&, std::vector<DenseMatrix>* grads)>;

// Central-difference check (f(th+h) - f(th-h)) / 2h against the analytic
// gradient. Relative error is |a - n| / max(1, |a|, |n|), so near-zero
// gradients are judged on absolute error. A repeated-evaluation mismatch
// marks the report non-deterministic, which fails it.
// max_entries_per_block = 0 checks every entry; otherwise a seeded subsample.
GradCheckReport finite_difference_check(const LossFn& loss_fn, ParamStore& params,
                                        double h = 1e-5, double tolerance = 1e-4,
                                        std::size_t max_entries_per_block = 0,
                                        std::uint64_t subsample_seed = 1);

}  // namespace leccr
