#pragma once

#include <vector>

#include "leccr/attention.hpp"
#include "leccr/param_store.hpp"

namespace leccr {

// Learnable query bank plus the aggregation block that turns projected
// description tokens into multi-view semantic slots:
//   Qbar = MHCA(Q, Z_c, Z_c);  M = LN(phi_q(Qbar)) + Qbar
struct SlotBankParams {
  std::size_t n_queries = 4;
  std::size_t dim = 128;
  std::size_t query_bank = 0;  // ParamStore slot, n_queries x dim
  AttentionParams attn;
  std::size_t phi_q = 0;
  std::size_t ln_gain = 0, ln_bias = 0;
};

SlotBankParams make_slot_bank(ParamStore& store, std::size_t n_queries, std::size_t dim,
                              std::size_t heads, Rng& rng);

struct SlotResult {
  Var slots;                         // n_queries x dim
  std::vector<Var> query_attention;  // per head, n_queries x len(Z_c)
};

SlotResult generate_slots(GraphContext& ctx, Var z_c, const SlotBankParams& bank);

// Slot-diversity objective over post-interaction slots, one matrix per
// batch item:
//   L_reg = -(1/B)(1/N_q) sum_i sum_j log softmax_k(m_ij . m_ik)[k = j]
Var regularization_loss(Tape& tape, const std::vector<Var>& slots_per_item);

constexpr double kLayerNormEps = 1e-5;

}  // namespace leccr
