#pragma once

#include <optional>
#include <vector>

#include "leccr/dense_matrix.hpp"
#include "leccr/tape.hpp"

namespace leccr {

// Cosine similarity between all row pairs: out[i][j] = cos(a_i, b_j).
// Zero-norm rows raise input_error; nothing is clamped.
Var cosine_matrix(Tape& tape, Var a, Var b);
DenseMatrix cosine_matrix_value(const DenseMatrix& a, const DenseMatrix& b);

// Symmetric InfoNCE with the positives on the diagonal, averaged over rows
// and columns with the 1/2 * 1/B factor. B = 1 evaluates to exactly 0.
Var contrastive_loss(Tape& tape, Var similarity, double tau);

// Caption-to-slots similarity: max over slot rows of cos(slot, h).
// Ties take the lowest slot index.
Var caption_slot_similarity(Tape& tape, Var h, Var slots);

// S_l as a B x B matrix: entry (i, j) = max_k cos(slots_j[k], h_i).
Var slot_similarity_matrix(Tape& tape, Var h_rows, const std::vector<Var>& slots_per_item);
DenseMatrix slot_similarity_matrix_value(const DenseMatrix& h_rows,
                                         const std::vector<DenseMatrix>& slots_per_item);

// One-directional InfoNCE over rows (caption -> candidates).
Var one_directional_infonce(Tape& tape, Var similarity, double tau);

struct MultiLevelLosses {
  Var l_sc, l_tc, l_c;
  Var l_vs, l_vt, l_v;
  Var l_ml;
};

// Caption-slots matching plus caption-vision matching:
//   L_c = (L_sc + L_tc) / 2,  L_v = (L_vs + L_vt) / 2,  L_ml = L_v + lambda1 * L_c.
// vt_override (the guidance-softened term) replaces L_vt inside L_v when set;
// the raw l_vt is still reported.
MultiLevelLosses multi_level_loss(Tape& tape, Var h_s, Var h_t, Var h_v_hat,
                                  const std::vector<Var>& slots_per_item, double tau,
                                  double lambda1, std::optional<Var> vt_override = std::nullopt);

}  // namespace leccr
