#include "leccr/hyper.hpp"

#include "leccr/errors.hpp"

namespace leccr {

DescriptionPooling pooling_from_name(const std::string& name) {
  if (name == "multi_view") return DescriptionPooling::multi_view;
  if (name == "cls") return DescriptionPooling::cls;
  if (name == "mean") return DescriptionPooling::mean;
  if (name == "all") return DescriptionPooling::all;
  throw config_error("unknown description pooling: " + name);
}

const char* pooling_name(DescriptionPooling p) {
  switch (p) {
    case DescriptionPooling::multi_view: return "multi_view";
    case DescriptionPooling::cls: return "cls";
    case DescriptionPooling::mean: return "mean";
    case DescriptionPooling::all: return "all";
  }
  return "?";
}

void HyperParams::validate() const {
  if (!(tau > 0.0)) throw config_error("tau must be positive");
  auto unit = [](double v, const char* name) {
    if (v < 0.0 || v > 1.0) throw config_error(std::string(name) + " must be in [0,1]");
  };
  unit(alpha, "alpha");
  unit(beta, "beta");
  unit(lambda1, "lambda1");
  unit(lambda2, "lambda2");
  if (mu < 0.0) throw config_error("mu must be >= 0");
  if (momentum < 0.0 || momentum >= 1.0) throw config_error("momentum must be in [0,1)");
  if (n_queries < 1) throw config_error("n_queries must be >= 1");
  if (common_dim < 1) throw config_error("common_dim must be >= 1");
  if (batch_size < 1) throw config_error("batch_size must be >= 1");
  if (heads < 1 || common_dim % heads != 0)
    throw config_error("heads must divide common_dim");
  if (!(lr0 >= 0.0)) throw config_error("lr0 must be >= 0");
}

nlohmann::ordered_json hyper_to_json(const HyperParams& hp) {
  nlohmann::ordered_json j;
  j["tau"] = hp.tau;
  j["alpha"] = hp.alpha;
  j["beta"] = hp.beta;
  j["lambda1"] = hp.lambda1;
  j["lambda2"] = hp.lambda2;
  j["mu"] = hp.mu;
  j["n_queries"] = hp.n_queries;
  j["common_dim"] = hp.common_dim;
  j["batch_size"] = hp.batch_size;
  j["epochs"] = hp.epochs;
  j["heads"] = hp.heads;
  j["lr0"] = hp.lr0;
  j["momentum"] = hp.momentum;
  j["interaction_mode"] = interaction_mode_name(hp.interaction_mode);
  j["interaction_direction"] = interaction_direction_name(hp.interaction_direction);
  j["description_pooling"] = pooling_name(hp.description_pooling);
  j["use_slots"] = hp.use_slots;
  j["share_text_encoders"] = hp.share_text_encoders;
  j["seed"] = hp.seed;
  return j;
}

HyperParams hyper_from_json(const nlohmann::ordered_json& j) {
  HyperParams hp;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    try {
      if (k == "tau") hp.tau = it.value().get<double>();
      else if (k == "alpha") hp.alpha = it.value().get<double>();
      else if (k == "beta") hp.beta = it.value().get<double>();
      else if (k == "lambda1") hp.lambda1 = it.value().get<double>();
      else if (k == "lambda2") hp.lambda2 = it.value().get<double>();
      else if (k == "mu") hp.mu = it.value().get<double>();
      else if (k == "n_queries") hp.n_queries = it.value().get<std::size_t>();
      else if (k == "common_dim") hp.common_dim = it.value().get<std::size_t>();
      else if (k == "batch_size") hp.batch_size = it.value().get<std::size_t>();
      else if (k == "epochs") hp.epochs = it.value().get<std::size_t>();
      else if (k == "heads") hp.heads = it.value().get<std::size_t>();
      else if (k == "lr0") hp.lr0 = it.value().get<double>();
      else if (k == "momentum") hp.momentum = it.value().get<double>();
      else if (k == "interaction_mode")
        hp.interaction_mode = interaction_mode_from_name(it.value().get<std::string>());
      else if (k == "interaction_direction")
        hp.interaction_direction =
            interaction_direction_from_name(it.value().get<std::string>());
      else if (k == "description_pooling")
        hp.description_pooling = pooling_from_name(it.value().get<std::string>());
      else if (k == "use_slots") hp.use_slots = it.value().get<bool>();
      else if (k == "share_text_encoders") hp.share_text_encoders = it.value().get<bool>();
      else if (k == "seed") hp.seed = it.value().get<std::uint64_t>();
      else throw config_error("unknown hyper-parameter key: " + k);
    } catch (const nlohmann::json::exception& e) {
      throw config_error("bad value for key '" + k + "': " + e.what());
    }
  }
  hp.validate();
  return hp;
}

}  // namespace leccr
