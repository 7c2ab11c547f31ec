#include "leccr/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "leccr/errors.hpp"
#include "leccr/feature_file.hpp"
#include "leccr/grad_suite.hpp"
#include "leccr/model.hpp"
#include "leccr/retrieval.hpp"
#include "leccr/synthetic.hpp"
#include "leccr/trainer.hpp"

namespace leccr {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kArtifactVersion = "0.1.0";

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Every output file gets <output>.manifest.json with enough state to
// reproduce it: effective config, seed, inputs, artifact version.
void write_run_manifest(const std::string& output_path, const std::string& subcommand,
                        const json& config, std::uint64_t seed, const json& inputs,
                        double wall_ms) {
  json m;
  m["artifact"] = "leccr";
  m["artifact_version"] = kArtifactVersion;
  m["subcommand"] = subcommand;
  m["seed"] = seed;
  m["config"] = config;
  m["inputs"] = inputs;
  m["output"] = output_path;
  m["wall_time_ms"] = wall_ms;
  write_text(output_path + ".manifest.json", m.dump(2) + "\n");
}

// Explicit flag beats LECCR_SEED beats the config/default value.
std::uint64_t effective_seed(std::uint64_t base, bool flag_given, std::uint64_t flag_value) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("LECCR_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw config_error("LECCR_SEED is not an unsigned integer");
    }
  }
  return base;
}

struct TrainConfig {
  HyperParams hyper;
  std::string data, out, test_data, report;
};

TrainConfig parse_config_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  TrainConfig cfg;
  json hyper_part = json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "data") cfg.data = it.value().get<std::string>();
    else if (k == "out") cfg.out = it.value().get<std::string>();
    else if (k == "test_data") cfg.test_data = it.value().get<std::string>();
    else if (k == "report") cfg.report = it.value().get<std::string>();
    else hyper_part[k] = it.value();
  }
  cfg.hyper = hyper_from_json(hyper_part);  // rejects unknown keys
  return cfg;
}

EncoderDims dims_of(const Dataset& ds) {
  if (ds.size() == 0) throw data_error("dataset is empty");
  EncoderDims d;
  d.dim_v = ds.items[0].visual.dim();
  d.dim_s = ds.items[0].english.dim();
  d.dim_t = ds.items[0].non_english.dim();
  d.dim_c = ds.items[0].description.dim();
  return d;
}

int cmd_gen_synth(const SyntheticSpec& spec, std::uint64_t seed, const std::string& out) {
  const double t0 = now_ms();
  Dataset ds = generate_synthetic(spec, seed);
  write_feature_file(out, ds);
  json cfg;
  cfg["n_items"] = spec.n_items;
  cfg["sigma_en"] = spec.sigma_en;
  cfg["sigma_noneng"] = spec.sigma_noneng;
  cfg["facets"] = spec.facets;
  cfg["dim_v"] = spec.dim_v;
  cfg["dim_s"] = spec.dim_s;
  cfg["dim_t"] = spec.dim_t;
  cfg["dim_c"] = spec.dim_c;
  cfg["len_v"] = spec.len_v;
  cfg["len_s"] = spec.len_s;
  cfg["len_t"] = spec.len_t;
  cfg["len_c"] = spec.len_c;
  cfg["facet_jitter"] = spec.facet_jitter;
  cfg["token_noise"] = spec.token_noise;
  write_run_manifest(out, "gen-synth", cfg, seed, json::object(), now_ms() - t0);
  std::cout << "wrote " << ds.size() << " items to " << out << "\n";
  return 0;
}

int cmd_train(const TrainConfig& cfg, std::uint64_t seed) {
  const double t0 = now_ms();
  if (cfg.data.empty()) throw config_error("train: no data path (config key 'data' or --data)");
  if (cfg.out.empty()) throw config_error("train: no output path (config key 'out' or --out)");
  Dataset train_data = read_feature_file(cfg.data);
  HyperParams hp = cfg.hyper;
  hp.seed = seed;
  LeccrModel model = LeccrModel::init(hp, dims_of(train_data));
  FitResult fitres = fit(model, train_data);

  write_checkpoint(cfg.out, model.store, model.meta_json());
  write_text(cfg.out + ".trainlog.csv", fitres.log.to_csv());
  json inputs;
  inputs["data"] = cfg.data;
  write_run_manifest(cfg.out, "train", hyper_to_json(hp), seed, inputs, now_ms() - t0);

  if (fitres.aborted) {
    std::cerr << "error[numeric]: training aborted at step " << fitres.steps_run
              << "; checkpoint holds the last good parameters\n";
    return 4;
  }
  const auto& recs = fitres.log.records;
  if (!recs.empty())
    std::cout << "trained " << recs.size() << " steps; L_total " << recs.front().l_total
              << " -> " << recs.back().l_total << "\n";
  std::cout << "checkpoint: " << cfg.out << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& data, double beta,
             bool beta_given, const std::string& dump_attn, const std::string& report) {
  const double t0 = now_ms();
  LeccrModel model = LeccrModel::from_checkpoint(read_checkpoint(checkpoint));
  Dataset test_data = read_feature_file(data);
  const double eff_beta = beta_given ? beta : model.hp.beta;

  if (!dump_attn.empty()) {
    fs::create_directories(dump_attn);
    std::vector<AttentionDump> dumps;
    embed_dataset(model, test_data, &dumps);
    char buf[64];
    for (const auto& d : dumps) {
      std::string csv;
      for (std::size_t i = 0; i < d.weights.rows(); ++i) {
        for (std::size_t j = 0; j < d.weights.cols(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.9g", d.weights(i, j));
          csv += buf;
          csv += (j + 1 == d.weights.cols()) ? "\n" : ",";
        }
      }
      write_text(dump_attn + "/attn_" + d.item_id + "_h" + std::to_string(d.head) + ".csv",
                 csv);
    }
    std::cout << "wrote " << dumps.size() << " attention maps to " << dump_attn << "\n";
  }

  EvalReport rep = evaluate_dataset(model, test_data, eff_beta);
  AblationRow row;
  row.config_id = "eval";
  row.axis = "beta";
  row.value = std::to_string(eff_beta);
  row.report = rep;
  write_text(report, eval_report_csv({row}));

  json cfg;
  cfg["checkpoint"] = checkpoint;
  cfg["data"] = data;
  cfg["beta"] = eff_beta;
  cfg["dump_attn"] = dump_attn;
  json inputs;
  inputs["checkpoint"] = checkpoint;
  inputs["data"] = data;
  write_run_manifest(report, "eval", cfg, model.hp.seed, inputs, now_ms() - t0);

  std::printf("t2v R@1 %.4f R@5 %.4f R@10 %.4f | v2t R@1 %.4f R@5 %.4f R@10 %.4f | SumR %.2f\n",
              rep.t2v.r1, rep.t2v.r5, rep.t2v.r10, rep.v2t.r1, rep.v2t.r5, rep.v2t.r10,
              rep.sum_r);
  return 0;
}

int cmd_ablate(const TrainConfig& cfg, std::uint64_t seed, const std::string& axis,
               const std::vector<std::string>& values, const std::string& report) {
  const double t0 = now_ms();
  if (cfg.data.empty() || cfg.test_data.empty())
    throw config_error("ablate: config needs 'data' and 'test_data' paths");
  Dataset train_data = read_feature_file(cfg.data);
  Dataset test_data = read_feature_file(cfg.test_data);
  HyperParams hp = cfg.hyper;
  hp.seed = seed;
  std::vector<AblationRow> rows = ablation_sweep(hp, train_data, test_data, axis, values);
  write_text(report, eval_report_csv(rows));

  json cfg_json = hyper_to_json(hp);
  cfg_json["axis"] = axis;
  cfg_json["values"] = values;
  json inputs;
  inputs["data"] = cfg.data;
  inputs["test_data"] = cfg.test_data;
  write_run_manifest(report, "ablate", cfg_json, seed, inputs, now_ms() - t0);

  for (const auto& r : rows)
    std::printf("%-28s SumR %.2f\n", r.config_id.c_str(), r.report.sum_r);
  return 0;
}

int cmd_grad_check(std::uint64_t seed, double h, double tol) {
  std::vector<GradSuiteResult> results = run_gradient_suite(seed, h, tol);
  bool all_ok = true;
  for (const auto& r : results) {
    const bool ok = r.report.passed();
    all_ok = all_ok && ok;
    std::printf("%-24s max_rel_err %.3e  %s\n", r.name.c_str(), r.report.max_rel_err,
                ok ? "PASS" : "FAIL");
  }
  if (!all_ok) {
    std::cerr << "error[numeric]: gradient check failed\n";
    return 4;
  }
  return 0;
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"LECCR-style cross-lingual cross-modal retrieval engine"};
  app.require_subcommand(1);

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic triplet dataset");
  SyntheticSpec spec;
  spec.n_items = 200;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n-items", spec.n_items, "Number of items");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Generation seed");
  gen->add_option("--sigma-en", spec.sigma_en, "English [CLS] noise level");
  gen->add_option("--sigma-noneng", spec.sigma_noneng, "Non-English [CLS] noise level");
  gen->add_option("--facets", spec.facets, "Facets per description");
  std::size_t gen_dim = 0;
  gen->add_option("--dim", gen_dim, "Feature dim for every modality");
  gen->add_option("--len-v", spec.len_v, "Visual sequence length");
  gen->add_option("--len-s", spec.len_s, "English sequence length");
  gen->add_option("--len-t", spec.len_t, "Non-English sequence length");
  gen->add_option("--len-c", spec.len_c, "Description sequence length");
  gen->add_option("--token-noise", spec.token_noise, "Per-token observation noise");
  gen->add_option("--facet-jitter", spec.facet_jitter, "Facet spread around the latent");
  gen->add_option("--out", gen_out, "Output feature file")->required();

  // train
  auto* train = app.add_subcommand("train", "Train from a config file");
  std::string train_config, train_data_flag, train_out_flag;
  std::uint64_t train_seed = 0;
  train->add_option("--config", train_config, "JSON config file")->required();
  train->add_option("--data", train_data_flag, "Training feature file (overrides config)");
  train->add_option("--out", train_out_flag, "Checkpoint path (overrides config)");
  auto* train_seed_opt = train->add_option("--seed", train_seed, "Seed (overrides config)");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string eval_ckpt, eval_data, eval_dump, eval_report = "report.csv";
  double eval_beta = 0.8;
  eval->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval->add_option("--data", eval_data, "Test feature file")->required();
  auto* beta_opt = eval->add_option("--beta", eval_beta, "Global/slot score blend");
  eval->add_option("--dump-attn", eval_dump, "Directory for attention map CSVs");
  eval->add_option("--report", eval_report, "Report CSV path");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Train/evaluate one run per axis value");
  std::string ab_config, ab_axis, ab_values, ab_report = "ablation.csv";
  std::string ab_data_flag, ab_test_flag;
  std::uint64_t ab_seed = 0;
  ablate->add_option("--config", ab_config, "JSON config file")->required();
  ablate->add_option("--axis", ab_axis,
                     "components | interaction | guidance_source | n_views | description_pooling")
      ->required();
  ablate->add_option("--values", ab_values, "Comma-separated axis values")->required();
  ablate->add_option("--data", ab_data_flag, "Training feature file (overrides config)");
  ablate->add_option("--test-data", ab_test_flag, "Test feature file (overrides config)");
  ablate->add_option("--report", ab_report, "Report CSV path");
  auto* ab_seed_opt = ablate->add_option("--seed", ab_seed, "Seed (overrides config)");

  // grad-check
  auto* gc = app.add_subcommand("grad-check", "Finite-difference check of every loss");
  std::uint64_t gc_seed = 7;
  double gc_h = 1e-5, gc_tol = 1e-4;
  auto* gc_seed_opt = gc->add_option("--seed", gc_seed, "Suite seed");
  gc->add_option("--fd-step", gc_h, "Central difference step");
  gc->add_option("--fd-tol", gc_tol, "Max relative error");

  std::vector<std::string> argv_copy(args.rbegin(), args.rend());  // CLI11 wants reversed
  try {
    app.parse(argv_copy);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 2;
  }

  if (gen->parsed()) {
    if (gen_dim != 0) spec.dim_v = spec.dim_s = spec.dim_t = spec.dim_c = gen_dim;
    return cmd_gen_synth(spec, effective_seed(1, gen_seed_opt->count() > 0, gen_seed), gen_out);
  }

  if (train->parsed()) {
    TrainConfig cfg = parse_config_file(train_config);
    if (!train_data_flag.empty()) cfg.data = train_data_flag;
    if (!train_out_flag.empty()) cfg.out = train_out_flag;
    return cmd_train(cfg, effective_seed(cfg.hyper.seed, train_seed_opt->count() > 0,
                                         train_seed));
  }

  if (eval->parsed())
    return cmd_eval(eval_ckpt, eval_data, eval_beta, beta_opt->count() > 0, eval_dump,
                    eval_report);

  if (ablate->parsed()) {
    TrainConfig cfg = parse_config_file(ab_config);
    if (!ab_data_flag.empty()) cfg.data = ab_data_flag;
    if (!ab_test_flag.empty()) cfg.test_data = ab_test_flag;
    std::vector<std::string> values;
    std::string cur;
    for (char c : ab_values) {
      if (c == ',') {
        if (!cur.empty()) values.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) values.push_back(cur);
    return cmd_ablate(cfg, effective_seed(cfg.hyper.seed, ab_seed_opt->count() > 0, ab_seed),
                      ab_axis, values, ab_report);
  }

  if (gc->parsed())
    return cmd_grad_check(effective_seed(7, gc_seed_opt->count() > 0, gc_seed), gc_h, gc_tol);

  std::cerr << "error[usage]: no subcommand\n";
  return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const config_error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const error& e) {
    std::cerr << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace leccr
