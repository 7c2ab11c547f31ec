#include "leccr/interaction.hpp"

#include <cmath>

#include "leccr/errors.hpp"
#include "leccr/slot_bank.hpp"

namespace leccr {

InteractionMode interaction_mode_from_name(const std::string& name) {
  if (name == "dual_cross") return InteractionMode::dual_cross;
  if (name == "co_attention") return InteractionMode::co_attention;
  throw config_error("unknown interaction mode: " + name);
}

const char* interaction_mode_name(InteractionMode m) {
  return m == InteractionMode::dual_cross ? "dual_cross" : "co_attention";
}

InteractionDirection interaction_direction_from_name(const std::string& name) {
  if (name == "both") return InteractionDirection::both;
  if (name == "v2c") return InteractionDirection::v2c_only;
  if (name == "c2v") return InteractionDirection::c2v_only;
  if (name == "off") return InteractionDirection::off;
  throw config_error("unknown interaction direction: " + name);
}

const char* interaction_direction_name(InteractionDirection d) {
  switch (d) {
    case InteractionDirection::both: return "both";
    case InteractionDirection::v2c_only: return "v2c";
    case InteractionDirection::c2v_only: return "c2v";
    case InteractionDirection::off: return "off";
  }
  return "?";
}

InteractionParams make_interaction_params(ParamStore& store, InteractionMode mode,
                                          std::size_t dim, std::size_t heads, Rng& rng) {
  InteractionParams p;
  p.mode = mode;
  p.dim = dim;
  const double sd = 1.0 / std::sqrt(double(dim));
  const std::string prefix =
      mode == InteractionMode::dual_cross ? "inter.dual" : "inter.co";
  if (mode == InteractionMode::dual_cross) {
    p.cross_v = make_attention_params(store, prefix + ".cross_v", dim, heads, rng);
    p.cross_m = make_attention_params(store, prefix + ".cross_m", dim, heads, rng);
  } else {
    p.self_attn = make_attention_params(store, prefix + ".self", dim, heads, rng);
  }
  p.phi_z = store.add(prefix + ".phi_z", DenseMatrix::gaussian(dim, dim, sd, rng));
  p.ln_z_gain = store.add(prefix + ".ln_z_gain", DenseMatrix::filled(1, dim, 1.0));
  p.ln_z_bias = store.add(prefix + ".ln_z_bias", DenseMatrix(1, dim));
  p.phi_m = store.add(prefix + ".phi_m", DenseMatrix::gaussian(dim, dim, sd, rng));
  p.ln_m_gain = store.add(prefix + ".ln_m_gain", DenseMatrix::filled(1, dim, 1.0));
  p.ln_m_bias = store.add(prefix + ".ln_m_bias", DenseMatrix(1, dim));
  return p;
}

namespace {

Var project_residual(GraphContext& ctx, Var x, std::size_t phi, std::size_t gain,
                     std::size_t bias) {
  Tape& t = ctx.tape;
  Var projected = t.matmul(x, ctx.p(phi));
  Var normed = t.layer_norm(projected, ctx.p(gain), ctx.p(bias), kLayerNormEps);
  return t.add(normed, x);
}

}  // namespace

InteractionResult interact(GraphContext& ctx, Var z_v, Var slots, const InteractionParams& p,
                           InteractionDirection direction) {
  Tape& t = ctx.tape;
  if (t.value(z_v).cols() != p.dim || t.value(slots).cols() != p.dim)
    throw shape_error("interact: visual/slot dim mismatch");

  InteractionResult res;
  res.z_v_hat = z_v;
  res.m_hat = slots;
  if (direction == InteractionDirection::off) return res;

  const bool want_c2v =
      direction == InteractionDirection::both || direction == InteractionDirection::c2v_only;
  const bool want_v2c =
      direction == InteractionDirection::both || direction == InteractionDirection::v2c_only;

  if (p.mode == InteractionMode::dual_cross) {
    if (want_c2v) {
      MhaResult to_v = multi_head_attention(t, z_v, slots, slots, bind_attention(ctx, p.cross_v));
      res.z_v_hat = project_residual(ctx, to_v.output, p.phi_z, p.ln_z_gain, p.ln_z_bias);
    }
    if (want_v2c) {
      MhaResult to_m = multi_head_attention(t, slots, z_v, z_v, bind_attention(ctx, p.cross_m));
      res.m_hat = project_residual(ctx, to_m.output, p.phi_m, p.ln_m_gain, p.ln_m_bias);
      res.v2c_attention = std::move(to_m.head_weights);
    }
    return res;
  }

  // co_attention: one self-attention over [Z_v; M], split back by length.
  const std::size_t n_v = t.value(z_v).rows();
  const std::size_t n_q = t.value(slots).rows();
  Var cat = t.concat_rows({z_v, slots});
  MhaResult self = multi_head_attention(t, cat, cat, cat, bind_attention(ctx, p.self_attn));
  if (want_c2v) {
    Var z_bar = t.slice_rows(self.output, 0, n_v);
    res.z_v_hat = project_residual(ctx, z_bar, p.phi_z, p.ln_z_gain, p.ln_z_bias);
  }
  if (want_v2c) {
    Var m_bar = t.slice_rows(self.output, n_v, n_v + n_q);
    res.m_hat = project_residual(ctx, m_bar, p.phi_m, p.ln_m_gain, p.ln_m_bias);
    // Slot rows attend over the whole concatenation; the exported map keeps
    // the vision block renormalized to row-stochastic form.
    for (Var w : self.head_weights) {
      Var block = t.slice_cols(t.slice_rows(w, n_v, n_v + n_q), 0, n_v);
      res.v2c_attention.push_back(t.normalize_rows_sum(block));
    }
  }
  return res;
}

}  // namespace leccr
