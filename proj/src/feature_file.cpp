#include "leccr/feature_file.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "leccr/errors.hpp"

namespace leccr {

namespace {

using json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'L', 'E', 'C', 'R'};
constexpr unsigned char kVersion = 0x01;

void append_u32(std::string& out, std::uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

void append_f32(std::string& out, float v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void append_f64(std::string& out, double v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_all(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw io_error("short write: " + path);
}

struct Container {
  json manifest;
  const char* payload = nullptr;
  std::size_t payload_len = 0;
};

Container parse_container(const std::string& bytes) {
  if (bytes.size() < 9) throw integrity_error("file truncated before header end");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw format_error("bad magic");
  if (static_cast<unsigned char>(bytes[4]) != kVersion)
    throw format_error("unsupported container version");
  std::uint32_t mlen = 0;
  for (int i = 3; i >= 0; --i) mlen = (mlen << 8) | static_cast<unsigned char>(bytes[5 + i]);
  if (bytes.size() < 9 + std::size_t(mlen)) throw integrity_error("file truncated in manifest");
  Container c;
  try {
    c.manifest = json::parse(bytes.begin() + 9, bytes.begin() + 9 + mlen);
  } catch (const json::exception& e) {
    throw manifest_error(std::string("manifest is not valid JSON: ") + e.what());
  }
  c.payload = bytes.data() + 9 + mlen;
  c.payload_len = bytes.size() - 9 - mlen;
  return c;
}

std::string build_container(const json& manifest, const std::string& payload) {
  std::string out;
  out.append(kMagic, 4);
  out.push_back(char(kVersion));
  const std::string mstr = manifest.dump();
  append_u32(out, std::uint32_t(mstr.size()));
  out += mstr;
  out += payload;
  return out;
}

double read_f32(const char* p) {
  float v;
  std::memcpy(&v, p, 4);
  return double(v);
}

double read_f64(const char* p) {
  double v;
  std::memcpy(&v, p, 8);
  return v;
}

}  // namespace

void write_feature_file(const std::string& path, const Dataset& ds) {
  json manifest;
  manifest["kind"] = "features";
  manifest["dtype"] = "f32";
  manifest["byte_order"] = "little";
  manifest["layout"] = "row-major";
  json items = json::array();
  std::string payload;
  for (const auto& ex : ds.items) {
    json entry;
    entry["id"] = ex.id;
    json mods = json::array();
    for (Modality m : {Modality::visual, Modality::english, Modality::non_english,
                       Modality::description}) {
      const FeatureSequence& seq = ex.modality(m);
      seq.validate();
      json jm;
      jm["name"] = modality_name(m);
      jm["rows"] = seq.tokens.rows();
      jm["cols"] = seq.tokens.cols();
      jm["cls_index"] = seq.cls_index;
      mods.push_back(std::move(jm));
      for (std::size_t i = 0; i < seq.tokens.size(); ++i)
        append_f32(payload, float(seq.tokens.data()[i]));
    }
    entry["modalities"] = std::move(mods);
    items.push_back(std::move(entry));
  }
  manifest["items"] = std::move(items);
  write_all(path, build_container(manifest, payload));
}

Dataset read_feature_file(const std::string& path) {
  const std::string bytes = read_all(path);
  Container c = parse_container(bytes);
  if (!c.manifest.contains("kind") || c.manifest["kind"] != "features")
    throw manifest_error("not a feature file manifest");
  if (c.manifest.value("dtype", "") != "f32" || c.manifest.value("byte_order", "") != "little" ||
      c.manifest.value("layout", "") != "row-major")
    throw manifest_error("unsupported feature payload description");

  Dataset ds;
  std::size_t off = 0;
  for (const auto& entry : c.manifest.at("items")) {
    TripletExample ex;
    ex.id = entry.at("id").get<std::string>();
    for (const auto& jm : entry.at("modalities")) {
      const Modality m = modality_from_name(jm.at("name").get<std::string>());
      const std::size_t rows = jm.at("rows").get<std::size_t>();
      const std::size_t cols = jm.at("cols").get<std::size_t>();
      const std::size_t cls = jm.at("cls_index").get<std::size_t>();
      if (rows == 0 || cols == 0) throw manifest_error("zero-sized sequence in manifest");
      if (cls >= rows) throw manifest_error("cls_index out of range in manifest");
      const std::size_t need = rows * cols * 4;
      if (off + need > c.payload_len) throw integrity_error("payload truncated");
      DenseMatrix tokens(rows, cols);
      for (std::size_t i = 0; i < rows * cols; ++i)
        tokens.data()[i] = read_f32(c.payload + off + i * 4);
      off += need;
      FeatureSequence seq{std::move(tokens), m, cls};
      switch (m) {
        case Modality::visual: ex.visual = std::move(seq); break;
        case Modality::english: ex.english = std::move(seq); break;
        case Modality::non_english: ex.non_english = std::move(seq); break;
        case Modality::description: ex.description = std::move(seq); break;
      }
    }
    ds.items.push_back(std::move(ex));
  }
  if (off != c.payload_len) throw integrity_error("payload length does not match manifest");
  return ds;
}

void write_checkpoint(const std::string& path, const ParamStore& params,
                      const nlohmann::ordered_json& meta) {
  json manifest;
  manifest["kind"] = "checkpoint";
  manifest["dtype"] = "f64";
  manifest["byte_order"] = "little";
  manifest["layout"] = "row-major";
  manifest["meta"] = meta;
  json jp = json::array();
  std::string payload;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = params[i];
    json je;
    je["name"] = e.name;
    je["rows"] = e.value.rows();
    je["cols"] = e.value.cols();
    je["trainable"] = e.trainable;
    jp.push_back(std::move(je));
    for (std::size_t k = 0; k < e.value.size(); ++k) append_f64(payload, e.value.data()[k]);
  }
  manifest["params"] = std::move(jp);
  write_all(path, build_container(manifest, payload));
}

Checkpoint read_checkpoint(const std::string& path) {
  const std::string bytes = read_all(path);
  Container c = parse_container(bytes);
  if (!c.manifest.contains("kind") || c.manifest["kind"] != "checkpoint")
    throw manifest_error("not a checkpoint manifest");
  if (c.manifest.value("dtype", "") != "f64")
    throw manifest_error("unsupported checkpoint payload description");
  Checkpoint ck;
  ck.meta = c.manifest.value("meta", json::object());
  std::size_t off = 0;
  for (const auto& je : c.manifest.at("params")) {
    const std::string name = je.at("name").get<std::string>();
    const std::size_t rows = je.at("rows").get<std::size_t>();
    const std::size_t cols = je.at("cols").get<std::size_t>();
    const bool trainable = je.at("trainable").get<bool>();
    const std::size_t need = rows * cols * 8;
    if (off + need > c.payload_len) throw integrity_error("payload truncated");
    DenseMatrix m(rows, cols);
    for (std::size_t k = 0; k < rows * cols; ++k) m.data()[k] = read_f64(c.payload + off + k * 8);
    off += need;
    ck.params.add(name, std::move(m), trainable);
  }
  if (off != c.payload_len) throw integrity_error("payload length does not match manifest");
  return ck;
}

}  // namespace leccr
