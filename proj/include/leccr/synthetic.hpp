#pragma once

#include <cstdint>

#include "leccr/features.hpp"

namespace leccr {

// Synthetic triplet generator. Each item has a unit-norm latent; visual
// tokens observe facet directions of that latent, the English [CLS] is the
// latent plus calibrated noise, the non-English [CLS] adds further noise on
// top of the English one, and description tokens enumerate the clean facet
// directions. Pure function of (spec, seed).
struct SyntheticSpec {
  std::size_t n_items = 0;
  std::size_t dim_v = 128, dim_s = 128, dim_t = 128, dim_c = 128;
  std::size_t len_v = 16, len_s = 12, len_t = 12, len_c = 24;
  double sigma_en = 0.1;
  double sigma_noneng = 0.2;
  std::size_t facets = 4;
  double facet_jitter = 0.5;
  double token_noise = 0.02;

  void validate() const;
};

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace leccr
