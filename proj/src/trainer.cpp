#include "leccr/trainer.hpp"

#include <cmath>
#include <cstdio>

#include "leccr/errors.hpp"
#include "leccr/guidance.hpp"
#include "leccr/matching.hpp"

namespace leccr {

TotalLoss total_loss(GraphContext& ctx, const BatchForward& fwd, const HyperParams& hp,
                     const SoftTargets* fixed_teacher) {
  Tape& t = ctx.tape;
  TotalLoss out;
  LossBundle& v = out.values;

  Var l_ts = contrastive_loss(t, cosine_matrix(t, fwd.h_t, fwd.h_s), hp.tau);
  v.l_ts = t.value(l_ts)(0, 0);

  Var l_ml;
  if (hp.use_slots) {
    Var l_vt = contrastive_loss(t, cosine_matrix(t, fwd.h_v_hat, fwd.h_t), hp.tau);
    std::optional<Var> vt_override;
    if (hp.lambda2 < 1.0) {
      SoftTargets targets;
      if (fixed_teacher) {
        targets = *fixed_teacher;
      } else {
        std::vector<DenseMatrix> slot_values;
        slot_values.reserve(fwd.slots.size());
        for (Var s : fwd.slots) slot_values.push_back(t.value(s));
        targets = soften_targets(t.value(fwd.h_s), t.value(fwd.h_v_hat), slot_values, hp.alpha,
                                 hp.tau);
      }
      GuidedVtLoss guided =
          guided_vt_loss(t, fwd.h_t, fwd.h_v_hat, targets, hp.tau, hp.lambda2, l_vt);
      vt_override = guided.l_vt_hat;
      v.l_rkt = t.value(guided.l_rkt)(0, 0);
    }
    MultiLevelLosses ml =
        multi_level_loss(t, fwd.h_s, fwd.h_t, fwd.h_v_hat, fwd.slots, hp.tau, hp.lambda1,
                         vt_override);
    v.l_vs = t.value(ml.l_vs)(0, 0);
    v.l_vt = t.value(l_vt)(0, 0);
    v.l_sc = t.value(ml.l_sc)(0, 0);
    v.l_tc = t.value(ml.l_tc)(0, 0);
    v.l_c = t.value(ml.l_c)(0, 0);
    v.l_v = t.value(ml.l_v)(0, 0);
    v.l_ml = t.value(ml.l_ml)(0, 0);
    l_ml = ml.l_ml;
  } else {
    // Baseline composition on the raw visual [CLS]: L_v only.
    Var l_vs = contrastive_loss(t, cosine_matrix(t, fwd.h_v_hat, fwd.h_s), hp.tau);
    Var l_vt = contrastive_loss(t, cosine_matrix(t, fwd.h_v_hat, fwd.h_t), hp.tau);
    Var l_v = t.scale(t.add(l_vs, l_vt), 0.5);
    v.l_vs = t.value(l_vs)(0, 0);
    v.l_vt = t.value(l_vt)(0, 0);
    v.l_v = t.value(l_v)(0, 0);
    v.l_ml = v.l_v;
    l_ml = l_v;
  }

  Var total = t.add(l_ts, l_ml);
  if (hp.use_slots && hp.mu > 0.0 && !fwd.slots.empty()) {
    Var l_reg = regularization_loss(t, fwd.slots);
    v.l_reg = t.value(l_reg)(0, 0);
    total = t.add(total, t.scale(l_reg, hp.mu));
  }
  v.total = t.value(total)(0, 0);

  for (double c : {v.l_ts, v.l_vs, v.l_vt, v.l_v, v.l_sc, v.l_tc, v.l_c, v.l_ml, v.l_rkt,
                   v.l_reg, v.total})
    if (!std::isfinite(c)) throw numeric_error("non-finite loss component");

  out.total = total;
  return out;
}

double lr_schedule(std::size_t step, std::size_t total_steps, double lr0) {
  if (total_steps == 0) throw input_error("lr_schedule: total_steps must be >= 1");
  if (step > total_steps) throw input_error("lr_schedule: step beyond total_steps");
  return lr0 * 0.5 * (1.0 + std::cos(M_PI * double(step) / double(total_steps)));
}

std::string TrainLog::to_csv() const {
  std::string out = "step,lr,L_total,L_ts,L_v,L_c,L_rkt,L_reg\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step,
                  r.lr, r.l_total, r.l_ts, r.l_v, r.l_c, r.l_rkt, r.l_reg);
    out += buf;
  }
  return out;
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = std::size_t(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

FitResult fit(LeccrModel& model, const Dataset& train_data) {
  const HyperParams& hp = model.hp;
  hp.validate();
  if (train_data.size() == 0) throw input_error("fit: empty dataset");

  FitResult result;
  if (hp.epochs == 0) return result;

  const std::size_t batches_per_epoch =
      (train_data.size() + hp.batch_size - 1) / hp.batch_size;
  const std::size_t total_steps = hp.epochs * batches_per_epoch;

  Rng shuffle_rng(hp.seed ^ 0x5affab1eull);
  std::vector<DenseMatrix> velocity;
  if (hp.momentum > 0.0) {
    velocity.reserve(model.store.size());
    for (std::size_t i = 0; i < model.store.size(); ++i)
      velocity.emplace_back(model.store[i].value.rows(), model.store[i].value.cols());
  }

  // Last-good snapshot so a numeric failure aborts without losing the run.
  std::vector<DenseMatrix> last_good;
  auto snapshot = [&] {
    last_good.clear();
    for (std::size_t i = 0; i < model.store.size(); ++i)
      last_good.push_back(model.store[i].value);
  };
  auto restore = [&] {
    for (std::size_t i = 0; i < model.store.size(); ++i)
      model.store[i].value = last_good[i];
  };
  snapshot();

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    Rng epoch_rng = shuffle_rng.fork(epoch);
    const std::vector<std::size_t> order = shuffled_indices(train_data.size(), epoch_rng);
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t lo = b * hp.batch_size;
      const std::size_t hi = std::min(lo + hp.batch_size, train_data.size());
      std::vector<std::size_t> batch(order.begin() + lo, order.begin() + hi);

      const double lr = lr_schedule(step, total_steps, hp.lr0);
      try {
        GraphContext ctx(model.store);
        BatchForward fwd = forward_batch(model, ctx, train_data, batch);
        TotalLoss loss = total_loss(ctx, fwd, hp);
        ctx.tape.backward(loss.total);

        for (std::size_t i = 0; i < model.store.size(); ++i) {
          auto& entry = model.store[i];
          if (!entry.trainable) continue;
          const DenseMatrix& g = ctx.tape.grad(ctx.params[i]);
          if (hp.momentum > 0.0) {
            DenseMatrix& vel = velocity[i];
            for (std::size_t k = 0; k < vel.size(); ++k) {
              vel.data()[k] = hp.momentum * vel.data()[k] + g.data()[k];
              entry.value.data()[k] -= lr * vel.data()[k];
            }
          } else {
            for (std::size_t k = 0; k < entry.value.size(); ++k)
              entry.value.data()[k] -= lr * g.data()[k];
          }
        }

        TrainRecord rec;
        rec.step = step;
        rec.lr = lr;
        rec.l_total = loss.values.total;
        rec.l_ts = loss.values.l_ts;
        rec.l_v = loss.values.l_v;
        rec.l_c = loss.values.l_c;
        rec.l_rkt = loss.values.l_rkt;
        rec.l_reg = loss.values.l_reg;
        result.log.records.push_back(rec);
        snapshot();
        ++step;
        ++result.steps_run;
      } catch (const numeric_error&) {
        restore();
        result.aborted = true;
        return result;
      } catch (const input_error&) {
        // Params and data were finite entering the step, so a non-finite
        // input mid-graph is a numeric blowup, not bad data.
        restore();
        result.aborted = true;
        return result;
      }
    }
  }
  return result;
}

}  // namespace leccr
