#include "leccr/slot_bank.hpp"

#include <cmath>

#include "leccr/errors.hpp"

namespace leccr {

SlotBankParams make_slot_bank(ParamStore& store, std::size_t n_queries, std::size_t dim,
                              std::size_t heads, Rng& rng) {
  if (n_queries < 1) throw config_error("slot bank needs at least one query");
  SlotBankParams p;
  p.n_queries = n_queries;
  p.dim = dim;
  const double sd = 1.0 / std::sqrt(double(dim));
  p.query_bank = store.add("slots.queries", DenseMatrix::gaussian(n_queries, dim, sd, rng));
  p.attn = make_attention_params(store, "slots.attn", dim, heads, rng);
  p.phi_q = store.add("slots.phi_q", DenseMatrix::gaussian(dim, dim, sd, rng));
  p.ln_gain = store.add("slots.ln_gain", DenseMatrix::filled(1, dim, 1.0));
  p.ln_bias = store.add("slots.ln_bias", DenseMatrix(1, dim));
  return p;
}

SlotResult generate_slots(GraphContext& ctx, Var z_c, const SlotBankParams& bank) {
  Tape& t = ctx.tape;
  if (t.value(z_c).rows() < 1) throw input_error("generate_slots: empty description sequence");
  if (t.value(z_c).cols() != bank.dim)
    throw shape_error("generate_slots: description dim does not match slot dim");
  Var queries = ctx.p(bank.query_bank);
  MhaResult agg = multi_head_attention(t, queries, z_c, z_c, bind_attention(ctx, bank.attn));
  Var projected = t.matmul(agg.output, ctx.p(bank.phi_q));
  Var normed = t.layer_norm(projected, ctx.p(bank.ln_gain), ctx.p(bank.ln_bias), kLayerNormEps);
  SlotResult res;
  res.slots = t.add(normed, agg.output);
  res.query_attention = std::move(agg.head_weights);
  return res;
}

Var regularization_loss(Tape& tape, const std::vector<Var>& slots_per_item) {
  if (slots_per_item.empty()) throw input_error("regularization_loss: empty batch");
  std::vector<Var> per_item;
  per_item.reserve(slots_per_item.size());
  for (Var slots : slots_per_item) {
    // Raw dot products between views; the softmax diagonal is each view's
    // probability of matching itself.
    Var gram = tape.matmul_nt(slots, slots);
    Var log_p = tape.log_softmax_rows(gram, 1.0);
    per_item.push_back(tape.mean_diag(log_p));
  }
  Var total = per_item.size() == 1 ? per_item[0] : tape.add_n(per_item);
  return tape.scale(total, -1.0 / double(per_item.size()));
}

}  // namespace leccr
