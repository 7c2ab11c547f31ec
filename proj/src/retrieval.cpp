#include "leccr/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "leccr/errors.hpp"
#include "leccr/matching.hpp"

namespace leccr {

double final_similarity(const DenseMatrix& h_t, const DenseMatrix& h_v_hat,
                        const DenseMatrix& slots, double beta) {
  if (beta < 0.0 || beta > 1.0) throw config_error("final_similarity: beta must be in [0,1]");
  const DenseMatrix s_g = cosine_matrix_value(h_t, h_v_hat);
  double score = beta * s_g(0, 0);
  if (beta < 1.0) {
    const DenseMatrix s_l = slot_similarity_matrix_value(h_t, {slots});
    score += (1.0 - beta) * s_l(0, 0);
  }
  return score;
}

RecallReport recall_metrics(const DenseMatrix& scores, const std::vector<std::size_t>& truth,
                            const std::vector<std::size_t>& ks) {
  const std::size_t queries = scores.rows();
  const std::size_t gallery = scores.cols();
  if (truth.size() != queries) throw data_error("recall_metrics: one truth id per query");
  if (queries == 0) throw data_error("recall_metrics: no queries");
  std::vector<std::size_t> sorted_ks = ks;
  std::sort(sorted_ks.begin(), sorted_ks.end());

  std::vector<std::size_t> hits(sorted_ks.size(), 0);
  for (std::size_t q = 0; q < queries; ++q) {
    const std::size_t gt = truth[q];
    if (gt >= gallery) throw data_error("recall_metrics: ground-truth id outside gallery");
    // Rank under descending score with ascending-index tie-break.
    const double gt_score = scores(q, gt);
    std::size_t rank = 1;
    for (std::size_t j = 0; j < gallery; ++j) {
      if (j == gt) continue;
      if (scores(q, j) > gt_score || (scores(q, j) == gt_score && j < gt)) ++rank;
    }
    for (std::size_t k = 0; k < sorted_ks.size(); ++k)
      if (rank <= sorted_ks[k]) ++hits[k];
  }

  RecallReport rep;
  auto frac = [&](std::size_t k_idx) { return double(hits[k_idx]) / double(queries); };
  for (std::size_t k = 0; k < sorted_ks.size(); ++k) {
    if (sorted_ks[k] == 1) rep.r1 = frac(k);
    if (sorted_ks[k] == 5) rep.r5 = frac(k);
    if (sorted_ks[k] == 10) rep.r10 = frac(k);
  }
  return rep;
}

EmbeddedDataset embed_dataset(const LeccrModel& model, const Dataset& data,
                              std::vector<AttentionDump>* attention) {
  if (data.size() == 0) throw input_error("embed_dataset: empty dataset");
  EmbeddedDataset emb;
  emb.h_s = DenseMatrix(data.size(), model.hp.common_dim);
  emb.h_t = DenseMatrix(data.size(), model.hp.common_dim);
  emb.h_v_hat = DenseMatrix(data.size(), model.hp.common_dim);

  // Chunked so each graph stays small; values only, no gradients.
  const std::size_t chunk = 32;
  for (std::size_t lo = 0; lo < data.size(); lo += chunk) {
    const std::size_t hi = std::min(lo + chunk, data.size());
    std::vector<std::size_t> idx;
    for (std::size_t i = lo; i < hi; ++i) idx.push_back(i);
    GraphContext ctx(model.store, /*with_grad=*/false);
    BatchForward fwd = forward_batch(model, ctx, data, idx);
    const DenseMatrix& hs = ctx.tape.value(fwd.h_s);
    const DenseMatrix& ht = ctx.tape.value(fwd.h_t);
    const DenseMatrix& hv = ctx.tape.value(fwd.h_v_hat);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < model.hp.common_dim; ++c) {
        emb.h_s(lo + r, c) = hs(r, c);
        emb.h_t(lo + r, c) = ht(r, c);
        emb.h_v_hat(lo + r, c) = hv(r, c);
      }
    for (Var s : fwd.slots) emb.slots.push_back(ctx.tape.value(s));
    if (attention) {
      for (std::size_t r = 0; r < fwd.v2c_attention.size(); ++r)
        for (std::size_t h = 0; h < fwd.v2c_attention[r].size(); ++h)
          attention->push_back(
              {data.items[idx[r]].id, h, ctx.tape.value(fwd.v2c_attention[r][h])});
    }
  }
  return emb;
}

DenseMatrix final_similarity_matrix(const EmbeddedDataset& emb, double beta) {
  if (beta < 0.0 || beta > 1.0) throw config_error("beta must be in [0,1]");
  DenseMatrix s_g = cosine_matrix_value(emb.h_t, emb.h_v_hat);
  if (beta == 1.0 || emb.slots.empty()) {
    if (beta < 1.0 && emb.slots.empty())
      throw config_error("beta < 1 requires slot embeddings; run with use_slots");
    return s_g;
  }
  DenseMatrix s_l = slot_similarity_matrix_value(emb.h_t, emb.slots);
  DenseMatrix out(s_g.rows(), s_g.cols());
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = beta * s_g.data()[i] + (1.0 - beta) * s_l.data()[i];
  return out;
}

EvalReport evaluate_dataset(const LeccrModel& model, const Dataset& data, double beta) {
  EmbeddedDataset emb = embed_dataset(model, data);
  const double eff_beta = model.hp.use_slots ? beta : 1.0;
  DenseMatrix t2v_scores = final_similarity_matrix(emb, eff_beta);
  // v2t is the same fused score read from the visual side: score(v_i, t_j)
  // equals the transpose entry by symmetry of both score components.
  DenseMatrix v2t_scores(t2v_scores.cols(), t2v_scores.rows());
  for (std::size_t i = 0; i < t2v_scores.rows(); ++i)
    for (std::size_t j = 0; j < t2v_scores.cols(); ++j) v2t_scores(j, i) = t2v_scores(i, j);

  std::vector<std::size_t> truth(data.size());
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = i;

  EvalReport rep;
  rep.t2v = recall_metrics(t2v_scores, truth);
  rep.t2v.direction = "t2v";
  rep.v2t = recall_metrics(v2t_scores, truth);
  rep.v2t.direction = "v2t";
  rep.sum_r =
      100.0 * (rep.t2v.r1 + rep.t2v.r5 + rep.t2v.r10 + rep.v2t.r1 + rep.v2t.r5 + rep.v2t.r10);
  return rep;
}

HyperParams apply_axis_value(const HyperParams& base, const std::string& axis,
                             const std::string& value) {
  HyperParams hp = base;
  if (axis == "components") {
    if (value == "baseline") {
      hp.use_slots = false;
      hp.mu = 0.0;
      hp.lambda1 = 0.0;
      hp.lambda2 = 1.0;
    } else if (value == "mvss") {
      hp.use_slots = true;
      hp.lambda1 = 0.0;
      hp.lambda2 = 1.0;
    } else if (value == "mm") {
      hp.use_slots = true;
      hp.lambda2 = 1.0;
    } else if (value == "smeg") {
      hp.use_slots = true;
    } else {
      throw config_error("components axis: unknown value '" + value + "'");
    }
  } else if (axis == "interaction") {
    if (value == "dual_cross" || value == "co_attention") {
      hp.interaction_mode = interaction_mode_from_name(value);
      hp.interaction_direction = InteractionDirection::both;
    } else if (value == "v2c" || value == "c2v" || value == "off" || value == "both") {
      hp.interaction_direction = interaction_direction_from_name(value);
    } else {
      throw config_error("interaction axis: unknown value '" + value + "'");
    }
  } else if (axis == "guidance_source") {
    if (value == "none") {
      hp.lambda2 = 1.0;
    } else if (value == "s_g") {
      hp.alpha = 1.0;
    } else if (value == "s_l") {
      hp.alpha = 0.0;
    } else if (value == "both") {
      ;  // keep base alpha and lambda2
    } else {
      throw config_error("guidance_source axis: unknown value '" + value + "'");
    }
  } else if (axis == "n_views") {
    const std::size_t n = std::size_t(std::stoul(value));
    if (n < 1) throw config_error("n_views must be >= 1");
    hp.n_queries = n;
  } else if (axis == "description_pooling") {
    hp.description_pooling = pooling_from_name(value);
  } else {
    throw config_error("unknown ablation axis: " + axis);
  }
  hp.validate();
  return hp;
}

std::vector<AblationRow> ablation_sweep(const HyperParams& base, const Dataset& train_data,
                                        const Dataset& test_data, const std::string& axis,
                                        const std::vector<std::string>& values) {
  if (values.empty()) throw config_error("ablation_sweep: no axis values");
  std::vector<AblationRow> rows;
  for (const std::string& value : values) {
    HyperParams hp = apply_axis_value(base, axis, value);
    EncoderDims dims;
    dims.dim_v = train_data.items.at(0).visual.dim();
    dims.dim_s = train_data.items.at(0).english.dim();
    dims.dim_t = train_data.items.at(0).non_english.dim();
    dims.dim_c = train_data.items.at(0).description.dim();
    LeccrModel model = LeccrModel::init(hp, dims);
    fit(model, train_data);
    AblationRow row;
    row.config_id = axis + "=" + value;
    row.axis = axis;
    row.value = value;
    row.report = evaluate_dataset(model, test_data, hp.beta);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string eval_report_csv(const std::vector<AblationRow>& rows) {
  std::string out =
      "config_id,axis,value,t2v_r1,t2v_r5,t2v_r10,v2t_r1,v2t_r5,v2t_r10,sum_r\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.4f\n",
                  r.config_id.c_str(), r.axis.c_str(), r.value.c_str(), r.report.t2v.r1,
                  r.report.t2v.r5, r.report.t2v.r10, r.report.v2t.r1, r.report.v2t.r5,
                  r.report.v2t.r10, r.report.sum_r);
    out += buf;
  }
  return out;
}

}  // namespace leccr
