#pragma once

#include <vector>

#include "leccr/feature_file.hpp"
#include "leccr/features.hpp"
#include "leccr/hyper.hpp"
#include "leccr/interaction.hpp"
#include "leccr/slot_bank.hpp"

namespace leccr {

// Parameter layout plus the per-batch forward assembly. Construction order
// of store slots is fixed so checkpoints map back by name.
struct LeccrModel {
  HyperParams hp;
  EncoderDims dims;
  ParamStore store;
  EncoderParams encoder;
  SlotBankParams slot_bank;       // meaningful only when uses_slot_bank()
  InteractionParams interaction;  // meaningful only when hp.use_slots

  bool uses_slot_bank() const {
    return hp.use_slots && hp.description_pooling == DescriptionPooling::multi_view;
  }

  static LeccrModel init(const HyperParams& hp, const EncoderDims& dims);
  static LeccrModel from_checkpoint(const Checkpoint& ck);
  nlohmann::ordered_json meta_json() const;
};

struct BatchForward {
  Var h_s, h_t, h_v, h_v_hat;  // B x d stacked [CLS] projections
  std::vector<Var> slots;      // per-item post-interaction slots; empty when disabled
  std::vector<std::vector<Var>> v2c_attention;  // [item][head]
};

BatchForward forward_batch(const LeccrModel& model, GraphContext& ctx, const Dataset& data,
                           const std::vector<std::size_t>& indices);

}  // namespace leccr
