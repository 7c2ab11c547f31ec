#include "leccr/model.hpp"

#include "leccr/errors.hpp"

namespace leccr {

LeccrModel LeccrModel::init(const HyperParams& hp, const EncoderDims& dims) {
  hp.validate();
  LeccrModel m;
  m.hp = hp;
  m.dims = dims;
  Rng rng(hp.seed ^ 0x9a7a11d5u);
  m.encoder = make_encoder_params(m.store, dims, hp.common_dim, hp.share_text_encoders, rng);
  if (m.uses_slot_bank())
    m.slot_bank = make_slot_bank(m.store, hp.n_queries, hp.common_dim, hp.heads, rng);
  if (hp.use_slots)
    m.interaction =
        make_interaction_params(m.store, hp.interaction_mode, hp.common_dim, hp.heads, rng);
  return m;
}

nlohmann::ordered_json LeccrModel::meta_json() const {
  nlohmann::ordered_json j;
  j["hyper"] = hyper_to_json(hp);
  nlohmann::ordered_json jd;
  jd["dim_v"] = dims.dim_v;
  jd["dim_s"] = dims.dim_s;
  jd["dim_t"] = dims.dim_t;
  jd["dim_c"] = dims.dim_c;
  j["dims"] = jd;
  return j;
}

LeccrModel LeccrModel::from_checkpoint(const Checkpoint& ck) {
  if (!ck.meta.contains("hyper") || !ck.meta.contains("dims"))
    throw manifest_error("checkpoint is missing hyper/dims metadata");
  HyperParams hp = hyper_from_json(ck.meta["hyper"]);
  EncoderDims dims;
  dims.dim_v = ck.meta["dims"].at("dim_v").get<std::size_t>();
  dims.dim_s = ck.meta["dims"].at("dim_s").get<std::size_t>();
  dims.dim_t = ck.meta["dims"].at("dim_t").get<std::size_t>();
  dims.dim_c = ck.meta["dims"].at("dim_c").get<std::size_t>();
  LeccrModel m = init(hp, dims);
  if (m.store.size() != ck.params.size())
    throw manifest_error("checkpoint parameter count does not match its hyper-parameters");
  for (std::size_t i = 0; i < m.store.size(); ++i) {
    const auto& loaded = ck.params[i];
    auto& slot = m.store[i];
    if (slot.name != loaded.name || !slot.value.same_shape(loaded.value))
      throw manifest_error("checkpoint parameter mismatch at '" + slot.name + "'");
    slot.value = loaded.value;
    slot.trainable = loaded.trainable;
  }
  return m;
}

BatchForward forward_batch(const LeccrModel& model, GraphContext& ctx, const Dataset& data,
                           const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw input_error("forward_batch: empty batch");
  Tape& t = ctx.tape;
  BatchForward out;
  std::vector<Var> hs_rows, ht_rows, hv_rows, hvh_rows;
  hs_rows.reserve(indices.size());
  ht_rows.reserve(indices.size());
  hv_rows.reserve(indices.size());
  hvh_rows.reserve(indices.size());

  for (std::size_t idx : indices) {
    if (idx >= data.size()) throw input_error("forward_batch: index out of range");
    const TripletExample& item = data.items[idx];
    EncodedItem enc = encode_and_project(ctx, item, model.encoder);
    hs_rows.push_back(enc.h_s);
    ht_rows.push_back(enc.h_t);
    hv_rows.push_back(enc.h_v);

    if (!model.hp.use_slots) {
      hvh_rows.push_back(enc.h_v);
      continue;
    }

    Var views;
    switch (model.hp.description_pooling) {
      case DescriptionPooling::multi_view:
        views = generate_slots(ctx, enc.z_c, model.slot_bank).slots;
        break;
      case DescriptionPooling::cls:
        views = t.take_row(enc.z_c, item.description.cls_index);
        break;
      case DescriptionPooling::mean:
        views = t.mean_rows(enc.z_c);
        break;
      case DescriptionPooling::all:
        views = enc.z_c;
        break;
    }
    InteractionResult inter =
        interact(ctx, enc.z_v, views, model.interaction, model.hp.interaction_direction);
    hvh_rows.push_back(t.take_row(inter.z_v_hat, item.visual.cls_index));
    out.slots.push_back(inter.m_hat);
    out.v2c_attention.push_back(std::move(inter.v2c_attention));
  }

  auto stack = [&](std::vector<Var>& rows) {
    return rows.size() == 1 ? rows[0] : t.concat_rows(rows);
  };
  out.h_s = stack(hs_rows);
  out.h_t = stack(ht_rows);
  out.h_v = stack(hv_rows);
  out.h_v_hat = stack(hvh_rows);
  return out;
}

}  // namespace leccr
