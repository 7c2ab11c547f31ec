#include "leccr/matching.hpp"

#include "leccr/errors.hpp"
#include "leccr/kernels.hpp"

namespace leccr {

Var cosine_matrix(Tape& tape, Var a, Var b) {
  if (tape.value(a).cols() != tape.value(b).cols())
    throw shape_error("cosine_matrix: dim mismatch");
  Var an = tape.l2_normalize_rows(a);
  Var bn = tape.l2_normalize_rows(b);
  return tape.matmul_nt(an, bn);
}

DenseMatrix cosine_matrix_value(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw shape_error("cosine_matrix: dim mismatch");
  DenseMatrix an(a.rows(), a.cols()), bn(b.rows(), b.cols());
  kernels::l2_normalize_rows(a, an);
  kernels::l2_normalize_rows(b, bn);
  DenseMatrix out(a.rows(), b.rows());
  kernels::matmul_nt(an, bn, out);
  return out;
}

Var contrastive_loss(Tape& tape, Var similarity, double tau) {
  if (!(tau > 0.0)) throw config_error("contrastive_loss: tau must be positive");
  const DenseMatrix& s = tape.value(similarity);
  if (s.rows() == 0) throw input_error("contrastive_loss: empty batch");
  if (s.rows() != s.cols()) throw shape_error("contrastive_loss: similarity must be square");
  Var row_term = tape.mean_diag(tape.log_softmax_rows(similarity, tau));
  Var col_term = tape.mean_diag(tape.log_softmax_rows(tape.transpose(similarity), tau));
  return tape.scale(tape.add(row_term, col_term), -0.5);
}

Var caption_slot_similarity(Tape& tape, Var h, Var slots) {
  if (tape.value(h).rows() != 1) throw shape_error("caption_slot_similarity: h must be one row");
  return tape.row_max(cosine_matrix(tape, h, slots));
}

Var slot_similarity_matrix(Tape& tape, Var h_rows, const std::vector<Var>& slots_per_item) {
  if (slots_per_item.empty()) throw input_error("slot_similarity_matrix: empty batch");
  Var hn = tape.l2_normalize_rows(h_rows);
  std::vector<Var> cols;
  cols.reserve(slots_per_item.size());
  for (Var slots : slots_per_item) {
    Var sn = tape.l2_normalize_rows(slots);
    cols.push_back(tape.row_max(tape.matmul_nt(hn, sn)));
  }
  return cols.size() == 1 ? cols[0] : tape.concat_cols(cols);
}

DenseMatrix slot_similarity_matrix_value(const DenseMatrix& h_rows,
                                         const std::vector<DenseMatrix>& slots_per_item) {
  if (slots_per_item.empty()) throw input_error("slot_similarity_matrix: empty batch");
  DenseMatrix hn(h_rows.rows(), h_rows.cols());
  kernels::l2_normalize_rows(h_rows, hn);
  DenseMatrix out(h_rows.rows(), slots_per_item.size());
  for (std::size_t j = 0; j < slots_per_item.size(); ++j) {
    const DenseMatrix& slots = slots_per_item[j];
    DenseMatrix sn(slots.rows(), slots.cols());
    kernels::l2_normalize_rows(slots, sn);
    DenseMatrix sim(h_rows.rows(), slots.rows());
    kernels::matmul_nt(hn, sn, sim);
    for (std::size_t i = 0; i < sim.rows(); ++i) {
      double best = sim(i, 0);
      for (std::size_t k = 1; k < sim.cols(); ++k)
        if (sim(i, k) > best) best = sim(i, k);
      out(i, j) = best;
    }
  }
  return out;
}

Var one_directional_infonce(Tape& tape, Var similarity, double tau) {
  if (!(tau > 0.0)) throw config_error("infonce: tau must be positive");
  const DenseMatrix& s = tape.value(similarity);
  if (s.rows() != s.cols()) throw shape_error("infonce: similarity must be square");
  return tape.scale(tape.mean_diag(tape.log_softmax_rows(similarity, tau)), -1.0);
}

MultiLevelLosses multi_level_loss(Tape& tape, Var h_s, Var h_t, Var h_v_hat,
                                  const std::vector<Var>& slots_per_item, double tau,
                                  double lambda1, std::optional<Var> vt_override) {
  const std::size_t batch = tape.value(h_s).rows();
  if (batch == 0 || tape.value(h_t).rows() != batch || tape.value(h_v_hat).rows() != batch ||
      slots_per_item.size() != batch)
    throw input_error("multi_level_loss: inconsistent batch");
  if (lambda1 < 0.0 || lambda1 > 1.0)
    throw config_error("multi_level_loss: lambda1 must be in [0,1]");

  MultiLevelLosses out;
  Var sl_s = slot_similarity_matrix(tape, h_s, slots_per_item);
  Var sl_t = slot_similarity_matrix(tape, h_t, slots_per_item);
  out.l_sc = one_directional_infonce(tape, sl_s, tau);
  out.l_tc = one_directional_infonce(tape, sl_t, tau);
  out.l_c = tape.scale(tape.add(out.l_sc, out.l_tc), 0.5);

  out.l_vs = contrastive_loss(tape, cosine_matrix(tape, h_v_hat, h_s), tau);
  out.l_vt = contrastive_loss(tape, cosine_matrix(tape, h_v_hat, h_t), tau);
  Var vt_used = vt_override.value_or(out.l_vt);
  out.l_v = tape.scale(tape.add(out.l_vs, vt_used), 0.5);

  out.l_ml = tape.add(out.l_v, tape.scale(out.l_c, lambda1));
  return out;
}

}  // namespace leccr
