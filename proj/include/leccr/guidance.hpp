#pragma once

#include <vector>

#include "leccr/dense_matrix.hpp"
#include "leccr/tape.hpp"

namespace leccr {

// Teacher distribution built from the English branch. Values are captured
// off-tape, so no gradient ever reaches the English features or the slots
// through Y (stop-gradient contract).
struct SoftTargets {
  DenseMatrix y;       // B x B, row-stochastic
  DenseMatrix s_soft;  // blended similarity the rows were softmaxed from
  double alpha = 0.5;
  double tau = 0.05;
};

// S_soft[i][j] = alpha * cos(h_s_i, h_v_hat_j) + (1-alpha) * S_l(h_s_i, slots_j);
// y_i = softmax(S_soft[i] / tau). alpha = 1 skips the slot term entirely.
SoftTargets soften_targets(const DenseMatrix& h_s, const DenseMatrix& h_v_hat,
                           const std::vector<DenseMatrix>& slots_per_item, double alpha,
                           double tau);

struct GuidedVtLoss {
  Var l_vt_hat;  // lambda2 * L_vt + (1-lambda2) * L_rkt
  Var l_rkt;     // (1/B) sum_i KL(y_i || ybar_i)
};

// ybar_i = softmax(cos(h_t_i, h_v_hat) / tau) on-tape; the KL is taken
// against the constant teacher rows.
GuidedVtLoss guided_vt_loss(Tape& tape, Var h_t, Var h_v_hat, const SoftTargets& targets,
                            double tau, double lambda2, Var l_vt);

}  // namespace leccr
