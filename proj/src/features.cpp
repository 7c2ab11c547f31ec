#include "leccr/features.hpp"

#include <cmath>

#include "leccr/errors.hpp"

namespace leccr {

const char* modality_name(Modality m) {
  switch (m) {
    case Modality::visual: return "visual";
    case Modality::english: return "english";
    case Modality::non_english: return "non_english";
    case Modality::description: return "description";
  }
  return "?";
}

Modality modality_from_name(const std::string& name) {
  if (name == "visual") return Modality::visual;
  if (name == "english") return Modality::english;
  if (name == "non_english") return Modality::non_english;
  if (name == "description") return Modality::description;
  throw manifest_error("unknown modality name: " + name);
}

void FeatureSequence::validate() const {
  if (tokens.rows() < 1) throw input_error("feature sequence must have at least one token");
  if (cls_index >= tokens.rows()) throw input_error("cls_index out of range");
  if (!tokens.all_finite()) throw input_error("feature sequence has non-finite entries");
}

const FeatureSequence& TripletExample::modality(Modality m) const {
  switch (m) {
    case Modality::visual: return visual;
    case Modality::english: return english;
    case Modality::non_english: return non_english;
    case Modality::description: return description;
  }
  throw input_error("bad modality");
}

EncoderParams make_encoder_params(ParamStore& store, const EncoderDims& dims,
                                  std::size_t common_dim, bool share_text, Rng& rng) {
  if (share_text && (dims.dim_s != dims.dim_t || dims.dim_s != dims.dim_c))
    throw config_error("text encoder sharing requires equal text feature dims");
  EncoderParams enc;
  enc.common_dim = common_dim;
  enc.share_text = share_text;
  auto init = [&](std::size_t d_in) {
    return DenseMatrix::gaussian(d_in, common_dim, 1.0 / std::sqrt(double(d_in)), rng);
  };
  enc.phi_v = store.add("enc.phi_v", init(dims.dim_v));
  enc.phi_s = store.add("enc.phi_s", init(dims.dim_s));
  if (share_text) {
    enc.phi_t = enc.phi_s;
    enc.phi_c = enc.phi_s;
  } else {
    enc.phi_t = store.add("enc.phi_t", init(dims.dim_t));
    enc.phi_c = store.add("enc.phi_c", init(dims.dim_c));
  }
  return enc;
}

EncodedItem encode_and_project(GraphContext& ctx, const TripletExample& item,
                               const EncoderParams& enc) {
  item.visual.validate();
  item.english.validate();
  item.non_english.validate();
  item.description.validate();
  Tape& t = ctx.tape;
  EncodedItem out;
  Var raw_v = t.leaf(item.visual.tokens);
  Var raw_s = t.leaf(item.english.tokens);
  Var raw_t = t.leaf(item.non_english.tokens);
  Var raw_c = t.leaf(item.description.tokens);
  out.z_v = t.matmul(raw_v, ctx.p(enc.phi_v));
  out.z_s = t.matmul(raw_s, ctx.p(enc.phi_s));
  out.z_t = t.matmul(raw_t, ctx.p(enc.phi_t));
  out.z_c = t.matmul(raw_c, ctx.p(enc.phi_c));
  out.h_v = t.take_row(out.z_v, item.visual.cls_index);
  out.h_s = t.take_row(out.z_s, item.english.cls_index);
  out.h_t = t.take_row(out.z_t, item.non_english.cls_index);
  return out;
}

}  // namespace leccr
