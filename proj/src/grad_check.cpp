#include "leccr/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "leccr/errors.hpp"
#include "leccr/rng.hpp"

namespace leccr {

GradCheckReport finite_difference_check(const LossFn& loss_fn, ParamStore& params, double h,
                                        double tolerance, std::size_t max_entries_per_block,
                                        std::uint64_t subsample_seed) {
  if (!(h > 0.0)) throw config_error("finite_difference_check: h must be positive");
  GradCheckReport report;
  report.tolerance = tolerance;

  const double f0 = loss_fn(params, nullptr);
  const double f1 = loss_fn(params, nullptr);
  if (f0 != f1) {
    report.deterministic = false;
    return report;
  }

  std::vector<DenseMatrix> analytic;
  loss_fn(params, &analytic);
  if (analytic.size() != params.size())
    throw input_error("finite_difference_check: gradient count mismatch");

  Rng rng(subsample_seed);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& entry = params[b];
    if (!entry.trainable) continue;
    GradCheckBlock block;
    block.name = entry.name;

    std::vector<std::size_t> idx(entry.value.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (max_entries_per_block != 0 && idx.size() > max_entries_per_block) {
      // Seeded Fisher-Yates prefix keeps the subsample reproducible.
      for (std::size_t i = 0; i < max_entries_per_block; ++i) {
        const std::size_t j = i + std::size_t(rng.below(idx.size() - i));
        std::swap(idx[i], idx[j]);
      }
      idx.resize(max_entries_per_block);
    }

    for (std::size_t i : idx) {
      const double saved = entry.value.data()[i];
      entry.value.data()[i] = saved + h;
      const double fp = loss_fn(params, nullptr);
      entry.value.data()[i] = saved - h;
      const double fm = loss_fn(params, nullptr);
      entry.value.data()[i] = saved;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[b].data()[i];
      const double rel =
          std::fabs(a - numeric) / std::max({1.0, std::fabs(a), std::fabs(numeric)});
      block.max_rel_err = std::max(block.max_rel_err, rel);
      ++block.entries_checked;
    }
    report.max_rel_err = std::max(report.max_rel_err, block.max_rel_err);
    report.blocks.push_back(std::move(block));
  }
  return report;
}

}  // namespace leccr
