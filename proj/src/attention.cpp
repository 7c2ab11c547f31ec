#include "leccr/attention.hpp"

#include <cmath>

#include "leccr/errors.hpp"

namespace leccr {

AttentionParams make_attention_params(ParamStore& store, const std::string& prefix,
                                      std::size_t dim, std::size_t heads, Rng& rng) {
  if (heads == 0 || dim % heads != 0)
    throw config_error("attention: model dim must be divisible by head count");
  const double sd = 1.0 / std::sqrt(double(dim));
  AttentionParams p;
  p.heads = heads;
  p.dim = dim;
  p.wq = store.add(prefix + ".wq", DenseMatrix::gaussian(dim, dim, sd, rng));
  p.wk = store.add(prefix + ".wk", DenseMatrix::gaussian(dim, dim, sd, rng));
  p.wv = store.add(prefix + ".wv", DenseMatrix::gaussian(dim, dim, sd, rng));
  p.wo = store.add(prefix + ".wo", DenseMatrix::gaussian(dim, dim, sd, rng));
  return p;
}

MhaWeights bind_attention(const GraphContext& ctx, const AttentionParams& p) {
  return MhaWeights{ctx.p(p.wq), ctx.p(p.wk), ctx.p(p.wv), ctx.p(p.wo), p.heads};
}

MhaResult multi_head_attention(Tape& tape, Var q_in, Var k_in, Var v_in, const MhaWeights& w) {
  const std::size_t d = tape.value(w.wq).rows();
  if (tape.value(q_in).cols() != d || tape.value(k_in).cols() != d ||
      tape.value(v_in).cols() != d)
    throw shape_error("attention: input dim does not match projection dim");
  if (tape.value(k_in).rows() != tape.value(v_in).rows())
    throw shape_error("attention: key/value lengths differ");
  if (w.heads == 0 || d % w.heads != 0)
    throw shape_error("attention: dim not divisible by head count");
  const std::size_t dh = d / w.heads;
  const double scl = 1.0 / std::sqrt(double(dh));

  Var qp = tape.matmul(q_in, w.wq);
  Var kp = tape.matmul(k_in, w.wk);
  Var vp = tape.matmul(v_in, w.wv);

  MhaResult res;
  std::vector<Var> heads;
  heads.reserve(w.heads);
  for (std::size_t h = 0; h < w.heads; ++h) {
    Var qh = tape.slice_cols(qp, h * dh, (h + 1) * dh);
    Var kh = tape.slice_cols(kp, h * dh, (h + 1) * dh);
    Var vh = tape.slice_cols(vp, h * dh, (h + 1) * dh);
    Var scores = tape.scale(tape.matmul_nt(qh, kh), scl);
    Var attn = tape.softmax_rows(scores, 1.0);
    res.head_weights.push_back(attn);
    heads.push_back(tape.matmul(attn, vh));
  }
  Var merged = w.heads == 1 ? heads[0] : tape.concat_cols(heads);
  res.output = tape.matmul(merged, w.wo);
  return res;
}

}  // namespace leccr
