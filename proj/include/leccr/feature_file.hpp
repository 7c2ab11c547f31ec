#pragma once

#include <string>

#include <json.hpp>

#include "leccr/features.hpp"
#include "leccr/param_store.hpp"

namespace leccr {

// Binary container: magic "LECR", version byte 0x01, u32-LE length-prefixed
// UTF-8 JSON manifest, then the raw payload in manifest order. Feature
// payloads are little-endian row-major f32; checkpoints carry f64 so a
// trained state round-trips bit-exactly.
void write_feature_file(const std::string& path, const Dataset& ds);
Dataset read_feature_file(const std::string& path);

struct Checkpoint {
  ParamStore params;
  nlohmann::ordered_json meta;
};

void write_checkpoint(const std::string& path, const ParamStore& params,
                      const nlohmann::ordered_json& meta);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace leccr
