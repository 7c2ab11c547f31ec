#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "leccr/dense_matrix.hpp"
#include "leccr/param_store.hpp"
#include "leccr/rng.hpp"

namespace leccr {

enum class Modality { visual, english, non_english, description };

const char* modality_name(Modality m);
Modality modality_from_name(const std::string& name);

// Encoder output for one item and one modality; token 0 is [CLS] by default.
struct FeatureSequence {
  DenseMatrix tokens;
  Modality modality = Modality::visual;
  std::size_t cls_index = 0;

  std::size_t length() const { return tokens.rows(); }
  std::size_t dim() const { return tokens.cols(); }
  void validate() const;
};

struct TripletExample {
  std::string id;
  FeatureSequence visual;
  FeatureSequence english;
  FeatureSequence non_english;
  FeatureSequence description;

  const FeatureSequence& modality(Modality m) const;
};

struct Dataset {
  std::vector<TripletExample> items;
  std::size_t size() const { return items.size(); }
};

// Per-modality linear projections into the common space. With text sharing
// enabled the English, non-English and description projections are one
// store slot, so an update through any alias moves all three.
struct EncoderParams {
  std::size_t common_dim = 128;
  bool share_text = true;
  std::size_t phi_v = 0, phi_s = 0, phi_t = 0, phi_c = 0;  // ParamStore slots
};

struct EncoderDims {
  std::size_t dim_v = 128, dim_s = 128, dim_t = 128, dim_c = 128;
};

EncoderParams make_encoder_params(ParamStore& store, const EncoderDims& dims,
                                  std::size_t common_dim, bool share_text, Rng& rng);

// Projected sequences (model dim) plus the [CLS] rows in the common space.
struct EncodedItem {
  Var z_v, z_s, z_t, z_c;
  Var h_v, h_s, h_t;
};

EncodedItem encode_and_project(GraphContext& ctx, const TripletExample& item,
                               const EncoderParams& enc);

}  // namespace leccr
