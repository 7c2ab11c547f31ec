#pragma once

#include <string>
#include <vector>

#include "leccr/guidance.hpp"
#include "leccr/model.hpp"

namespace leccr {

// Per-step loss values, read off the graph after the forward pass.
struct LossBundle {
  double l_ts = 0.0;
  double l_vs = 0.0, l_vt = 0.0, l_v = 0.0;
  double l_sc = 0.0, l_tc = 0.0, l_c = 0.0;
  double l_ml = 0.0;
  double l_rkt = 0.0;
  double l_reg = 0.0;
  double total = 0.0;
};

struct TotalLoss {
  Var total;
  LossBundle values;
};

// L = L_ts + L_ml + mu * L_reg, with the guidance-softened term replacing
// L_vt inside L_ml whenever lambda2 < 1. Any non-finite component aborts
// the step with numeric_error.
// The teacher rows are constants under backpropagation. fixed_teacher
// pins them explicitly (the gradient checker differentiates exactly the
// function a descent step sees); by default they are rebuilt from the
// current batch values.
TotalLoss total_loss(GraphContext& ctx, const BatchForward& fwd, const HyperParams& hp,
                     const SoftTargets* fixed_teacher = nullptr);

// lr0 * (1 + cos(pi * step / total_steps)) / 2
double lr_schedule(std::size_t step, std::size_t total_steps, double lr0);

struct TrainRecord {
  std::size_t step = 0;
  double lr = 0.0;
  double l_total = 0.0, l_ts = 0.0, l_v = 0.0, l_c = 0.0, l_rkt = 0.0, l_reg = 0.0;
};

struct TrainLog {
  std::vector<TrainRecord> records;
  std::string to_csv() const;
};

struct FitResult {
  TrainLog log;
  bool aborted = false;       // numeric failure; params hold the last good step
  std::size_t steps_run = 0;
};

// Seeded mini-batch gradient descent over shuffled epochs. Deterministic:
// the same (dataset, hyper, seed) triple reproduces the TrainLog bit for bit.
FitResult fit(LeccrModel& model, const Dataset& train_data);

}  // namespace leccr
