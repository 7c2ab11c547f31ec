#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "leccr/param_store.hpp"
#include "leccr/rng.hpp"
#include "leccr/tape.hpp"

namespace leccr {

// Store-level description of one multi-head attention block. Each of
// wq/wk/wv/wo is a d x d matrix; the head blocks are column slices of
// width d / heads.
struct AttentionParams {
  std::size_t heads = 4;
  std::size_t dim = 128;
  std::size_t wq = 0, wk = 0, wv = 0, wo = 0;  // ParamStore slots
};

AttentionParams make_attention_params(ParamStore& store, const std::string& prefix,
                                      std::size_t dim, std::size_t heads, Rng& rng);

// Tape-level weights for one call.
struct MhaWeights {
  Var wq, wk, wv, wo;
  std::size_t heads = 1;
};

MhaWeights bind_attention(const GraphContext& ctx, const AttentionParams& p);

struct MhaResult {
  Var output;
  std::vector<Var> head_weights;  // per head, rows(q) x rows(k), row-stochastic
};

// Scaled dot-product attention, residual-free, scale 1/sqrt(d/heads).
// Self-attention is the q == k == v call.
MhaResult multi_head_attention(Tape& tape, Var q_in, Var k_in, Var v_in, const MhaWeights& w);

}  // namespace leccr
