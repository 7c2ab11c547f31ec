#pragma once

#include <string>
#include <vector>

#include "leccr/attention.hpp"
#include "leccr/param_store.hpp"

namespace leccr {

enum class InteractionMode { dual_cross, co_attention };
enum class InteractionDirection { both, v2c_only, c2v_only, off };

InteractionMode interaction_mode_from_name(const std::string& name);
const char* interaction_mode_name(InteractionMode m);
InteractionDirection interaction_direction_from_name(const std::string& name);
const char* interaction_direction_name(InteractionDirection d);

// Visual/slot fusion block. dual_cross runs two cross-attentions with the
// visual tokens and the slots as the respective queries; co_attention runs
// one self-attention over the row-wise concatenation [Z_v; M] and splits
// the result. Both finish with LN(phi(x)) + x on each stream.
struct InteractionParams {
  InteractionMode mode = InteractionMode::dual_cross;
  std::size_t dim = 128;
  AttentionParams cross_v;    // dual_cross, queries = Z_v
  AttentionParams cross_m;    // dual_cross, queries = M
  AttentionParams self_attn;  // co_attention
  std::size_t phi_z = 0, ln_z_gain = 0, ln_z_bias = 0;
  std::size_t phi_m = 0, ln_m_gain = 0, ln_m_bias = 0;
};

InteractionParams make_interaction_params(ParamStore& store, InteractionMode mode,
                                          std::size_t dim, std::size_t heads, Rng& rng);

struct InteractionResult {
  Var z_v_hat;  // semantic-enhanced visual tokens, shape of Z_v
  Var m_hat;    // local contextual visual semantics, shape of M
  // Per-head slot-over-vision maps (N_q x N_v), each row summing to 1.
  std::vector<Var> v2c_attention;
};

InteractionResult interact(GraphContext& ctx, Var z_v, Var slots, const InteractionParams& p,
                           InteractionDirection direction = InteractionDirection::both);

}  // namespace leccr
