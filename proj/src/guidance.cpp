#include "leccr/guidance.hpp"

#include <cmath>

#include "leccr/errors.hpp"
#include "leccr/kernels.hpp"
#include "leccr/matching.hpp"

namespace leccr {

SoftTargets soften_targets(const DenseMatrix& h_s, const DenseMatrix& h_v_hat,
                           const std::vector<DenseMatrix>& slots_per_item, double alpha,
                           double tau) {
  if (alpha < 0.0 || alpha > 1.0) throw config_error("soften_targets: alpha must be in [0,1]");
  if (!(tau > 0.0)) throw config_error("soften_targets: tau must be positive");
  const std::size_t batch = h_s.rows();
  if (h_v_hat.rows() != batch) throw input_error("soften_targets: batch mismatch");

  SoftTargets out;
  out.alpha = alpha;
  out.tau = tau;
  DenseMatrix s_g = cosine_matrix_value(h_s, h_v_hat);
  if (alpha == 1.0) {
    out.s_soft = std::move(s_g);
  } else {
    if (slots_per_item.size() != batch)
      throw input_error("soften_targets: slot batch mismatch");
    DenseMatrix s_l = slot_similarity_matrix_value(h_s, slots_per_item);
    out.s_soft = DenseMatrix(batch, batch);
    for (std::size_t i = 0; i < out.s_soft.size(); ++i)
      out.s_soft.data()[i] = alpha * s_g.data()[i] + (1.0 - alpha) * s_l.data()[i];
  }
  out.y = DenseMatrix(batch, batch);
  kernels::softmax_rows(out.s_soft, tau, out.y);
  return out;
}

GuidedVtLoss guided_vt_loss(Tape& tape, Var h_t, Var h_v_hat, const SoftTargets& targets,
                            double tau, double lambda2, Var l_vt) {
  if (lambda2 < 0.0 || lambda2 > 1.0)
    throw config_error("guided_vt_loss: lambda2 must be in [0,1]");
  if (!(tau > 0.0)) throw config_error("guided_vt_loss: tau must be positive");
  const std::size_t batch = tape.value(h_t).rows();
  const DenseMatrix& y = targets.y;
  if (y.rows() != batch || y.cols() != batch)
    throw input_error("guided_vt_loss: target shape mismatch");
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < y.cols(); ++j) {
      if (y(i, j) < 0.0) throw input_error("guided_vt_loss: negative target probability");
      s += y(i, j);
    }
    if (std::fabs(s - 1.0) > 1e-6) throw input_error("guided_vt_loss: target rows must sum to 1");
  }

  // KL(y || ybar) = sum y log y - sum y log ybar; the first term is constant.
  double entropy_term = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = y.data()[i];
    if (v > 0.0) entropy_term += v * std::log(v);
  }
  Var log_ybar = tape.log_softmax_rows(cosine_matrix(tape, h_t, h_v_hat), tau);
  Var cross = tape.weighted_sum(log_ybar, y, -1.0 / double(batch));
  GuidedVtLoss out;
  out.l_rkt = tape.add_scalar(cross, entropy_term / double(batch));
  out.l_vt_hat = tape.add(tape.scale(l_vt, lambda2), tape.scale(out.l_rkt, 1.0 - lambda2));
  return out;
}

}  // namespace leccr
