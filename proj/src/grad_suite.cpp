#include "leccr/grad_suite.hpp"

#include "leccr/guidance.hpp"
#include "leccr/matching.hpp"
#include "leccr/model.hpp"
#include "leccr/synthetic.hpp"
#include "leccr/trainer.hpp"

namespace leccr {

namespace {

ParamStore random_store(const std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>& shapes,
                        Rng& rng) {
  ParamStore store;
  for (const auto& [name, shape] : shapes)
    store.add(name, DenseMatrix::gaussian(shape.first, shape.second, 1.0, rng));
  return store;
}

void fill_grads(GraphContext& ctx, Var root, std::vector<DenseMatrix>* grads) {
  if (!grads) return;
  ctx.tape.backward(root);
  grads->clear();
  for (Var p : ctx.params) grads->push_back(ctx.tape.grad(p));
}

GradSuiteResult check_contrastive(std::uint64_t seed, double h, double tol) {
  Rng rng(seed * 31 + 1);
  ParamStore store = random_store({{"a", {4, 6}}, {"b", {4, 6}}}, rng);
  auto loss = [](const ParamStore& s, std::vector<DenseMatrix>* grads) {
    GraphContext ctx(s);
    Var l = contrastive_loss(ctx.tape, cosine_matrix(ctx.tape, ctx.p(0), ctx.p(1)), 0.3);
    fill_grads(ctx, l, grads);
    return ctx.tape.value(l)(0, 0);
  };
  return {"contrastive_loss", finite_difference_check(loss, store, h, tol)};
}

GradSuiteResult check_regularization(std::uint64_t seed, double h, double tol) {
  Rng rng(seed * 31 + 2);
  ParamStore store = random_store({{"slots0", {3, 5}}, {"slots1", {3, 5}}}, rng);
  auto loss = [](const ParamStore& s, std::vector<DenseMatrix>* grads) {
    GraphContext ctx(s);
    Var l = regularization_loss(ctx.tape, {ctx.p(0), ctx.p(1)});
    fill_grads(ctx, l, grads);
    return ctx.tape.value(l)(0, 0);
  };
  return {"regularization_loss", finite_difference_check(loss, store, h, tol)};
}

GradSuiteResult check_caption_slot(std::uint64_t seed, double h, double tol) {
  Rng rng(seed * 31 + 3);
  ParamStore store = random_store({{"h", {1, 5}}, {"slots", {4, 5}}}, rng);
  auto loss = [](const ParamStore& s, std::vector<DenseMatrix>* grads) {
    GraphContext ctx(s);
    Var l = caption_slot_similarity(ctx.tape, ctx.p(0), ctx.p(1));
    fill_grads(ctx, l, grads);
    return ctx.tape.value(l)(0, 0);
  };
  return {"caption_slot_similarity", finite_difference_check(loss, store, h, tol)};
}

GradSuiteResult check_soften_guided(std::uint64_t seed, double h, double tol) {
  Rng rng(seed * 31 + 4);
  ParamStore store = random_store({{"h_t", {4, 6}}, {"h_v", {4, 6}}}, rng);
  // Teacher rows are captured once; the checked function is
  // L_rkt(h_t, h_v | Y) exactly as backpropagation sees it.
  DenseMatrix h_s = DenseMatrix::gaussian(4, 6, 1.0, rng);
  std::vector<DenseMatrix> slots;
  for (int i = 0; i < 4; ++i) slots.push_back(DenseMatrix::gaussian(3, 6, 1.0, rng));
  SoftTargets targets = soften_targets(h_s, store[1].value, slots, 0.5, 0.4);
  auto loss = [targets](const ParamStore& s, std::vector<DenseMatrix>* grads) {
    GraphContext ctx(s);
    Var l_vt = ctx.tape.constant_scalar(0.0);
    GuidedVtLoss g = guided_vt_loss(ctx.tape, ctx.p(0), ctx.p(1), targets, 0.4, 0.25, l_vt);
    fill_grads(ctx, g.l_vt_hat, grads);
    return ctx.tape.value(g.l_vt_hat)(0, 0);
  };
  return {"guided_vt_loss", finite_difference_check(loss, store, h, tol)};
}

GradSuiteResult check_soften_targets_blend(std::uint64_t seed, double h, double tol) {
  Rng rng(seed * 31 + 5);
  ParamStore store =
      random_store({{"h_s", {3, 5}}, {"h_v", {3, 5}}, {"s0", {2, 5}}, {"s1", {2, 5}},
                    {"s2", {2, 5}}},
                   rng);
  // The on-tape mirror of the soft-target blend: checks S_soft's pieces,
  // i.e. the blended similarity as a differentiable function.
  auto loss = [](const ParamStore& s, std::vector<DenseMatrix>* grads) {
    GraphContext ctx(s);
    Tape& t = ctx.tape;
    Var s_g = cosine_matrix(t, ctx.p(0), ctx.p(1));
    Var s_l = slot_similarity_matrix(t, ctx.p(0), {ctx.p(2), ctx.p(3), ctx.p(4)});
    Var blend = t.add(t.scale(s_g, 0.6), t.scale(s_l, 0.4));
    Var l = t.mean_diag(t.log_softmax_rows(blend, 0.7));
    fill_grads(ctx, l, grads);
    return t.value(l)(0, 0);
  };
  return {"soften_targets_blend", finite_difference_check(loss, store, h, tol)};
}

GradSuiteResult check_multi_level(std::uint64_t seed, double h, double tol) {
  Rng rng(seed * 31 + 6);
  ParamStore store = random_store(
      {{"h_s", {4, 6}}, {"h_t", {4, 6}}, {"h_v", {4, 6}}, {"m0", {3, 6}}, {"m1", {3, 6}},
       {"m2", {3, 6}}, {"m3", {3, 6}}},
      rng);
  auto loss = [](const ParamStore& s, std::vector<DenseMatrix>* grads) {
    GraphContext ctx(s);
    MultiLevelLosses ml =
        multi_level_loss(ctx.tape, ctx.p(0), ctx.p(1), ctx.p(2),
                         {ctx.p(3), ctx.p(4), ctx.p(5), ctx.p(6)}, 0.3, 0.7);
    fill_grads(ctx, ml.l_ml, grads);
    return ctx.tape.value(ml.l_ml)(0, 0);
  };
  return {"multi_level_loss", finite_difference_check(loss, store, h, tol)};
}

GradSuiteResult check_total(std::uint64_t seed, InteractionMode mode, double h, double tol,
                            std::size_t entries_per_block) {
  HyperParams hp;
  hp.common_dim = 8;
  hp.heads = 2;
  hp.n_queries = 2;
  hp.tau = 0.4;
  hp.lambda1 = 0.5;
  hp.lambda2 = 0.5;
  hp.alpha = 0.5;
  hp.mu = 0.2;
  hp.interaction_mode = mode;
  hp.seed = seed;
  SyntheticSpec spec;
  spec.n_items = 3;
  spec.dim_v = spec.dim_s = spec.dim_t = spec.dim_c = 8;
  spec.len_v = 4;
  spec.len_s = 3;
  spec.len_t = 3;
  spec.len_c = 5;
  spec.facets = 2;
  Dataset data = generate_synthetic(spec, seed + 99);
  EncoderDims dims{8, 8, 8, 8};
  LeccrModel model = LeccrModel::init(hp, dims);

  // The teacher is frozen at the evaluation point: backpropagation treats
  // the softened targets as constants, so the function under test must too.
  SoftTargets teacher;
  {
    GraphContext ctx(model.store, /*with_grad=*/false);
    BatchForward fwd = forward_batch(model, ctx, data, {0, 1, 2});
    std::vector<DenseMatrix> slot_values;
    for (Var s : fwd.slots) slot_values.push_back(ctx.tape.value(s));
    teacher = soften_targets(ctx.tape.value(fwd.h_s), ctx.tape.value(fwd.h_v_hat), slot_values,
                             hp.alpha, hp.tau);
  }

  auto loss = [&model, &data, &teacher](const ParamStore& s, std::vector<DenseMatrix>* grads) {
    LeccrModel bound = model;  // layout only; values come from s
    bound.store = s;
    GraphContext ctx(bound.store);
    BatchForward fwd = forward_batch(bound, ctx, data, {0, 1, 2});
    TotalLoss tl = total_loss(ctx, fwd, bound.hp, &teacher);
    fill_grads(ctx, tl.total, grads);
    return ctx.tape.value(tl.total)(0, 0);
  };
  const std::string name = std::string("total_loss_") + interaction_mode_name(mode);
  ParamStore params = model.store;
  return {name, finite_difference_check(loss, params, h, tol, entries_per_block, seed)};
}

}  // namespace

std::vector<GradSuiteResult> run_gradient_suite(std::uint64_t seed, double h, double tolerance,
                                                std::size_t composed_entries_per_block) {
  std::vector<GradSuiteResult> out;
  out.push_back(check_contrastive(seed, h, tolerance));
  out.push_back(check_regularization(seed, h, tolerance));
  out.push_back(check_caption_slot(seed, h, tolerance));
  out.push_back(check_soften_guided(seed, h, tolerance));
  out.push_back(check_soften_targets_blend(seed, h, tolerance));
  out.push_back(check_multi_level(seed, h, tolerance));
  out.push_back(
      check_total(seed, InteractionMode::dual_cross, h, tolerance, composed_entries_per_block));
  out.push_back(
      check_total(seed, InteractionMode::co_attention, h, tolerance, composed_entries_per_block));
  return out;
}

}  // namespace leccr
