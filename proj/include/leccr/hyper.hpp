#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "leccr/interaction.hpp"

namespace leccr {

enum class DescriptionPooling { multi_view, cls, mean, all };

DescriptionPooling pooling_from_name(const std::string& name);
const char* pooling_name(DescriptionPooling p);

// Every free scalar of the objective plus the training-shape knobs.
// JSON configs mirror these field names one to one.
struct HyperParams {
  double tau = 0.05;      // shared softmax temperature
  double alpha = 0.5;     // soft-target blend between S_g and S_l
  double beta = 0.8;      // inference-time blend of global and slot scores
  double lambda1 = 0.4;   // caption-slots matching weight
  double lambda2 = 0.6;   // hard-vs-softened visual/non-English blend
  double mu = 0.1;        // slot diversity weight
  std::size_t n_queries = 4;
  std::size_t common_dim = 128;
  std::size_t batch_size = 32;
  std::size_t epochs = 40;
  std::size_t heads = 4;
  double lr0 = 1e-5;
  double momentum = 0.0;  // 0 = plain gradient descent
  InteractionMode interaction_mode = InteractionMode::dual_cross;
  InteractionDirection interaction_direction = InteractionDirection::both;
  DescriptionPooling description_pooling = DescriptionPooling::multi_view;
  bool use_slots = true;
  bool share_text_encoders = true;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::ordered_json hyper_to_json(const HyperParams& hp);
// Strict: unknown keys are rejected, known keys overwrite defaults.
HyperParams hyper_from_json(const nlohmann::ordered_json& j);

}  // namespace leccr
