#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "leccr/cli.hpp"
#include "leccr/feature_file.hpp"

using namespace leccr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("leccr_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(++counter));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

const char* kTinyConfig = R"({
  "common_dim": 16, "heads": 2, "n_queries": 2,
  "batch_size": 4, "epochs": 1, "lr0": 0.05, "seed": 5
})";

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({"train"}) == 2);          // missing --config
  CHECK(run_cli({}) == 2);                 // no subcommand
  CHECK(run_cli({"gen-synth"}) == 2);      // missing --out
  CHECK(run_cli({"eval", "--checkpoint", "x"}) == 2);
}

TEST_CASE("config violations exit 3") {
  TempDir dir;
  SUBCASE("unknown config key") {
    write_text(dir.file("cfg.json"), R"({"common_dim": 16, "no_such_knob": 1})");
    CHECK(run_cli({"train", "--config", dir.file("cfg.json")}) == 3);
  }
  SUBCASE("invalid hyper value") {
    write_text(dir.file("cfg.json"), R"({"tau": -1.0})");
    CHECK(run_cli({"train", "--config", dir.file("cfg.json")}) == 3);
  }
  SUBCASE("config without data path") {
    write_text(dir.file("cfg.json"), kTinyConfig);
    CHECK(run_cli({"train", "--config", dir.file("cfg.json")}) == 3);
  }
}

TEST_CASE("gen-synth writes the dataset and a run manifest") {
  TempDir dir;
  const std::string out = dir.file("data.lecr");
  CHECK(run_cli({"gen-synth", "--n-items", "6", "--seed", "3", "--dim", "16", "--len-v", "4",
                 "--len-s", "3", "--len-t", "3", "--len-c", "5", "--out", out}) == 0);
  CHECK(fs::exists(out));
  CHECK(fs::exists(out + ".manifest.json"));
  Dataset ds = read_feature_file(out);
  CHECK(ds.size() == 6);
  auto manifest = nlohmann::ordered_json::parse(slurp(out + ".manifest.json"));
  CHECK(manifest["subcommand"] == "gen-synth");
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["config"]["n_items"] == 6);
}

TEST_CASE("seed precedence: flag beats env beats default") {
  TempDir dir;
  const std::string a = dir.file("a.lecr"), b = dir.file("b.lecr"), c = dir.file("c.lecr"),
                    d = dir.file("d.lecr");
  ::setenv("LECCR_SEED", "99", 1);
  CHECK(run_cli({"gen-synth", "--n-items", "2", "--dim", "16", "--out", a}) == 0);
  CHECK(run_cli({"gen-synth", "--n-items", "2", "--dim", "16", "--seed", "3", "--out", b}) == 0);
  ::unsetenv("LECCR_SEED");
  CHECK(run_cli({"gen-synth", "--n-items", "2", "--dim", "16", "--seed", "99", "--out", c}) == 0);
  CHECK(run_cli({"gen-synth", "--n-items", "2", "--dim", "16", "--seed", "3", "--out", d}) == 0);
  CHECK(slurp(a) == slurp(c));   // env matched explicit 99
  CHECK(slurp(b) == slurp(d));   // flag won over env
  CHECK(slurp(a) != slurp(b));
}

TEST_CASE("full pipeline smoke: gen-synth, train, eval, replay") {
  TempDir dir;
  const std::string data = dir.file("train.lecr");
  const std::string test = dir.file("test.lecr");
  const std::string ckpt = dir.file("model.lecr");
  const std::string report = dir.file("report.csv");

  REQUIRE(run_cli({"gen-synth", "--n-items", "12", "--seed", "1", "--dim", "16", "--len-v", "4",
                   "--len-s", "3", "--len-t", "3", "--len-c", "5", "--out", data}) == 0);
  REQUIRE(run_cli({"gen-synth", "--n-items", "8", "--seed", "2", "--dim", "16", "--len-v", "4",
                   "--len-s", "3", "--len-t", "3", "--len-c", "5", "--out", test}) == 0);

  write_text(dir.file("cfg.json"), kTinyConfig);
  REQUIRE(run_cli({"train", "--config", dir.file("cfg.json"), "--data", data, "--out", ckpt}) ==
          0);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(ckpt + ".trainlog.csv"));
  CHECK(fs::exists(ckpt + ".manifest.json"));

  const std::string attn_dir = dir.file("attn");
  REQUIRE(run_cli({"eval", "--checkpoint", ckpt, "--data", test, "--beta", "0.8", "--report",
                   report, "--dump-attn", attn_dir}) == 0);
  CHECK(fs::exists(report));
  CHECK(fs::exists(report + ".manifest.json"));
  const std::string first = slurp(report);
  CHECK(first.find("config_id,axis,value,t2v_r1") == 0);
  // 8 items x 2 heads of attention maps.
  std::size_t n_maps = 0;
  for (auto const& e : fs::directory_iterator(attn_dir)) {
    (void)e;
    ++n_maps;
  }
  CHECK(n_maps == 16);

  // Replaying the manifest's eval reproduces the report byte for byte.
  auto manifest = nlohmann::ordered_json::parse(slurp(report + ".manifest.json"));
  const std::string report2 = dir.file("report2.csv");
  REQUIRE(run_cli({"eval", "--checkpoint", manifest["config"]["checkpoint"].get<std::string>(),
                   "--data", manifest["config"]["data"].get<std::string>(), "--beta",
                   std::to_string(manifest["config"]["beta"].get<double>()), "--report",
                   report2}) == 0);
  CHECK(slurp(report2) == first);
}

TEST_CASE("ablate runs one row per value") {
  TempDir dir;
  const std::string data = dir.file("train.lecr");
  const std::string test = dir.file("test.lecr");
  REQUIRE(run_cli({"gen-synth", "--n-items", "8", "--seed", "4", "--dim", "16", "--len-v", "4",
                   "--len-s", "3", "--len-t", "3", "--len-c", "5", "--out", data}) == 0);
  REQUIRE(run_cli({"gen-synth", "--n-items", "6", "--seed", "5", "--dim", "16", "--len-v", "4",
                   "--len-s", "3", "--len-t", "3", "--len-c", "5", "--out", test}) == 0);
  write_text(dir.file("cfg.json"), kTinyConfig);
  const std::string report = dir.file("ablate.csv");
  REQUIRE(run_cli({"ablate", "--config", dir.file("cfg.json"), "--data", data, "--test-data",
                   test, "--axis", "n_views", "--values", "1,2", "--report", report}) == 0);
  const std::string csv = slurp(report);
  CHECK(csv.find("n_views=1") != std::string::npos);
  CHECK(csv.find("n_views=2") != std::string::npos);
  SUBCASE("invalid axis value exits 3") {
    CHECK(run_cli({"ablate", "--config", dir.file("cfg.json"), "--data", data, "--test-data",
                   test, "--axis", "n_views", "--values", "0", "--report", report}) == 3);
  }
}

TEST_CASE("grad-check subcommand passes") {
  CHECK(run_cli({"grad-check", "--seed", "3"}) == 0);
}
