#pragma once

#include <string>
#include <vector>

#include "leccr/model.hpp"
#include "leccr/synthetic.hpp"
#include "leccr/trainer.hpp"

namespace leccr {

struct RecallReport {
  std::string direction;  // "t2v" or "v2t"
  double r1 = 0.0, r5 = 0.0, r10 = 0.0;  // fractions
};

struct EvalReport {
  RecallReport t2v, v2t;
  double sum_r = 0.0;  // 100 * (all six recall fractions)
};

// Inference-time fused score: beta * cos(h_t, h_v_hat) + (1-beta) * S_l.
double final_similarity(const DenseMatrix& h_t, const DenseMatrix& h_v_hat,
                        const DenseMatrix& slots, double beta);

// Candidates ranked by descending score, ties broken by ascending index.
// truth[q] is the gallery index of query q's single ground-truth item.
RecallReport recall_metrics(const DenseMatrix& scores, const std::vector<std::size_t>& truth,
                            const std::vector<std::size_t>& ks = {1, 5, 10});

// Value-level embeddings of a whole dataset, plus optional attention export.
struct AttentionDump {
  std::string item_id;
  std::size_t head = 0;
  DenseMatrix weights;  // N_q x N_v, row-stochastic
};

struct EmbeddedDataset {
  DenseMatrix h_s, h_t, h_v_hat;       // items x d
  std::vector<DenseMatrix> slots;      // per item; empty when slots disabled
};

EmbeddedDataset embed_dataset(const LeccrModel& model, const Dataset& data,
                              std::vector<AttentionDump>* attention = nullptr);

// Full fused score matrix, queries = captions, gallery = visual items.
DenseMatrix final_similarity_matrix(const EmbeddedDataset& emb, double beta);

EvalReport evaluate_dataset(const LeccrModel& model, const Dataset& data, double beta);

// One ablation row; the CSV writer in the CLI prints these.
struct AblationRow {
  std::string config_id;
  std::string axis;
  std::string value;
  EvalReport report;
};

// Trains one run per axis value (shared seed) and evaluates on test data.
std::vector<AblationRow> ablation_sweep(const HyperParams& base, const Dataset& train_data,
                                        const Dataset& test_data, const std::string& axis,
                                        const std::vector<std::string>& values);

// Applies one axis value to a config; exposed for tests and the CLI.
HyperParams apply_axis_value(const HyperParams& base, const std::string& axis,
                             const std::string& value);

std::string eval_report_csv(const std::vector<AblationRow>& rows);

}  // namespace leccr
