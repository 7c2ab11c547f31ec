#include <cmath>

#include <doctest.h>

#include "leccr/errors.hpp"
#include "leccr/slot_bank.hpp"
#include "oracles.hpp"

using namespace leccr;

namespace {

const double kLogHalfPair = std::log(1.0 + std::exp(-1.0));  // orthonormal pair value

double mean_offdiag_cosine(const DenseMatrix& slots) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < slots.rows(); ++i)
    for (std::size_t j = 0; j < slots.rows(); ++j) {
      if (i == j) continue;
      acc += oracle::cosine(slots, i, slots, j);
      ++n;
    }
  return acc / double(n);
}

}  // namespace

TEST_CASE("regularization loss closed forms") {
  Tape t;
  SUBCASE("orthonormal pair") {
    DenseMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    Var l = regularization_loss(t, {t.leaf(m)});
    CHECK(t.value(l)(0, 0) == doctest::Approx(kLogHalfPair).epsilon(1e-9));
    CHECK(t.value(l)(0, 0) == doctest::Approx(0.3133).epsilon(1e-3));
  }
  SUBCASE("duplicated unit slots") {
    DenseMatrix m(2, 3);
    m(0, 0) = 1.0;
    m(1, 0) = 1.0;
    Var l = regularization_loss(t, {t.leaf(m)});
    CHECK(t.value(l)(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  }
  SUBCASE("single view gives zero") {
    Rng rng(3);
    Var l = regularization_loss(t, {t.leaf(DenseMatrix::gaussian(1, 5, 1.0, rng))});
    CHECK(t.value(l)(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("matches the scalar oracle on random batches") {
    for (std::uint64_t c = 0; c < 20; ++c) {
      Rng rng(500 + c);
      std::vector<DenseMatrix> slots;
      std::vector<Var> vars;
      const std::size_t batch = 1 + rng.below(4), nq = 1 + rng.below(5);
      Tape tape;
      for (std::size_t b = 0; b < batch; ++b) {
        slots.push_back(DenseMatrix::gaussian(nq, 6, 1.0, rng));
        vars.push_back(tape.leaf(slots.back()));
      }
      Var l = regularization_loss(tape, vars);
      CHECK(tape.value(l)(0, 0) == doctest::Approx(oracle::l_reg(slots)).epsilon(1e-9));
    }
  }
  SUBCASE("always non-negative") {
    for (std::uint64_t c = 0; c < 100; ++c) {
      Rng rng(900 + c);
      Tape tape;
      Var l = regularization_loss(
          tape, {tape.leaf(DenseMatrix::gaussian(1 + rng.below(6), 4, 2.0, rng))});
      CHECK(tape.value(l)(0, 0) >= 0.0);
    }
  }
  SUBCASE("orthonormal beats duplicated") {
    CHECK(kLogHalfPair < std::log(2.0));
  }
}

TEST_CASE("generate_slots") {
  SUBCASE("single description token: every slot attends it fully") {
    Rng rng(4);
    ParamStore store;
    SlotBankParams bank = make_slot_bank(store, 3, 8, 2, rng);
    GraphContext ctx(store);
    Var z_c = ctx.tape.leaf(DenseMatrix::gaussian(1, 8, 1.0, rng));
    SlotResult res = generate_slots(ctx, z_c, bank);
    CHECK(ctx.tape.value(res.slots).rows() == 3);
    for (const Var& w : res.query_attention) {
      const DenseMatrix& wv = ctx.tape.value(w);
      for (std::size_t i = 0; i < wv.rows(); ++i)
        CHECK(wv(i, 0) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("single query degenerates to one pooled view") {
    Rng rng(5);
    ParamStore store;
    SlotBankParams bank = make_slot_bank(store, 1, 8, 2, rng);
    GraphContext ctx(store);
    Var z_c = ctx.tape.leaf(DenseMatrix::gaussian(6, 8, 1.0, rng));
    SlotResult res = generate_slots(ctx, z_c, bank);
    CHECK(ctx.tape.value(res.slots).rows() == 1);
    CHECK(ctx.tape.value(res.slots).cols() == 8);
  }
  SUBCASE("matches the compositional oracle") {
    Rng rng(6);
    ParamStore store;
    SlotBankParams bank = make_slot_bank(store, 4, 16, 4, rng);
    DenseMatrix z_c = DenseMatrix::gaussian(6, 16, 1.0, rng);
    GraphContext ctx(store);
    SlotResult res = generate_slots(ctx, ctx.tape.leaf(z_c), bank);
    DenseMatrix expect = oracle::slot_generation(
        store[bank.query_bank].value, z_c, store[bank.attn.wq].value, store[bank.attn.wk].value,
        store[bank.attn.wv].value, store[bank.attn.wo].value, 4, store[bank.phi_q].value,
        store[bank.ln_gain].value, store[bank.ln_bias].value, kLayerNormEps);
    const DenseMatrix& got = ctx.tape.value(res.slots);
    for (std::size_t i = 0; i < got.rows(); ++i)
      for (std::size_t j = 0; j < got.cols(); ++j)
        CHECK(got(i, j) == doctest::Approx(expect(i, j)).epsilon(1e-9));
  }
  SUBCASE("output shape is independent of description length") {
    Rng rng(7);
    ParamStore store;
    SlotBankParams bank = make_slot_bank(store, 4, 8, 2, rng);
    for (std::size_t len : {1, 3, 9, 17}) {
      GraphContext ctx(store);
      Var z_c = ctx.tape.leaf(DenseMatrix::gaussian(len, 8, 1.0, rng));
      SlotResult res = generate_slots(ctx, z_c, bank);
      CHECK(ctx.tape.value(res.slots).rows() == 4);
      CHECK(ctx.tape.value(res.slots).cols() == 8);
    }
  }
}

TEST_CASE("gradient descent on the diversity loss separates near-duplicates") {
  // Seeded slots within cosine 0.99 of each other; 200 plain GD steps on
  // L_reg alone must strictly reduce the mean off-diagonal cosine.
  Rng rng(8);
  const std::size_t nq = 4, d = 32;
  DenseMatrix base = DenseMatrix::gaussian(1, d, 1.0, rng);
  double norm = 0.0;
  for (std::size_t j = 0; j < d; ++j) norm += base(0, j) * base(0, j);
  norm = std::sqrt(norm);
  DenseMatrix slots(nq, d);
  for (std::size_t i = 0; i < nq; ++i)
    for (std::size_t j = 0; j < d; ++j)
      slots(i, j) = base(0, j) / norm + 0.005 * rng.normal();

  const double initial = mean_offdiag_cosine(slots);
  CHECK(initial >= 0.99);

  double prev = initial;
  for (int step = 0; step < 200; ++step) {
    Tape t;
    Var s = t.leaf(slots, /*requires_grad=*/true);
    Var l = regularization_loss(t, {s});
    t.backward(l);
    const DenseMatrix& g = t.grad(s);
    for (std::size_t i = 0; i < slots.size(); ++i) slots.data()[i] -= 2.0 * g.data()[i];
  }
  const double final_cos = mean_offdiag_cosine(slots);
  CHECK(final_cos < prev);  // strict decrease
  CHECK(final_cos < 0.5);
}

TEST_CASE("empty description sequence rejected") {
  Rng rng(9);
  ParamStore store;
  SlotBankParams bank = make_slot_bank(store, 2, 8, 2, rng);
  GraphContext ctx(store);
  // A zero-row matrix cannot exist through the public types; the guard
  // triggers on dim mismatch instead.
  Var z_bad = ctx.tape.leaf(DenseMatrix::gaussian(3, 4, 1.0, rng));
  CHECK_THROWS_AS(generate_slots(ctx, z_bad, bank), shape_error);
}
