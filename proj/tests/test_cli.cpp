#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// End-to-end checks of the lslp binary at miniature scale. CMake injects the
// binary path as LSLP_CLI_PATH.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lslp/cloud_io.hpp"
#include "lslp/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const fs::path out_file = fs::temp_directory_path() / "lslp_cli_out.txt";
  const std::string cmd = std::string(LSLP_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "lslp_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path tiny_config() {
  static const fs::path path = [] {
    const fs::path p = work_dir() / "tiny.json";
    std::ofstream out(p);
    out << R"({
      "preset": "desk",
      "ladder": {"n0": 16, "latent_dims": [8, 8, 8]},
      "arch": {"encoder_hidden": [16, 24], "decoder_hidden": [24], "gan_hidden": [16, 16], "noise_dim": 8},
      "ae_train": {"epochs": 6, "batch_size": 4, "learning_rate": 0.001, "emd_tol": 0.2},
      "gan_train": {"epochs": 6, "batch_size": 4},
      "dataset": {"count": 10, "classes": 4}
    })";
    return p;
  }();
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json artifact_hashes(const fs::path& manifest_path) {
  json m = json::parse(slurp(manifest_path));
  json hashes = json::object();
  for (const auto& a : m.at("artifacts")) hashes[a.at("path").get<std::string>()] = a.at("fnv1a");
  return hashes;
}

}  // namespace

TEST_CASE("cli: ingest produces the declared ladder and is seed-reproducible") {
  const auto dir = work_dir();
  const std::string cfg = " --config " + tiny_config().string();

  const auto r1 = run_cli("ingest --synthetic 10" + cfg + " --seed 11 --out " + (dir / "ds_a").string());
  REQUIRE(r1.exit_code == 0);

  // 10 shape dirs, each with sizes (16, 32, 64)
  int shape_dirs = 0;
  for (const auto& e : fs::directory_iterator(dir / "ds_a" / "shapes")) {
    ++shape_dirs;
    CHECK(lslp::load_cloud(e.path() / "level_0.pcld").size() == 16);
    CHECK(lslp::load_cloud(e.path() / "level_1.pcld").size() == 32);
    CHECK(lslp::load_cloud(e.path() / "level_2.pcld").size() == 64);
  }
  CHECK(shape_dirs == 10);

  const auto r2 = run_cli("ingest --synthetic 10" + cfg + " --seed 11 --out " + (dir / "ds_b").string());
  REQUIRE(r2.exit_code == 0);
  CHECK(artifact_hashes(dir / "ds_a" / "run_manifest.json") ==
        artifact_hashes(dir / "ds_b" / "run_manifest.json"));

  // and a different seed changes the artifacts
  const auto r3 = run_cli("ingest --synthetic 10" + cfg + " --seed 12 --out " + (dir / "ds_c").string());
  REQUIRE(r3.exit_code == 0);
  CHECK(artifact_hashes(dir / "ds_a" / "run_manifest.json") !=
        artifact_hashes(dir / "ds_c" / "run_manifest.json"));
}

TEST_CASE("cli: ingest failure modes exit nonzero") {
  const auto dir = work_dir();
  fs::create_directories(dir / "empty_meshes");
  const auto r = run_cli("ingest --mesh-dir " + (dir / "empty_meshes").string() + " --out " +
                         (dir / "ds_fail").string());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("cli: train enforces stage prerequisites by name") {
  const auto dir = work_dir();
  const std::string cfg = " --config " + tiny_config().string();
  const auto r = run_cli("train --dataset " + (dir / "ds_a").string() + " --stage gan-1" + cfg +
                         " --out " + (dir / "run_bad").string());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("ae-1") != std::string::npos);
}

TEST_CASE("cli: full pipeline train -> synthesize -> upsample -> evaluate") {
  const auto dir = work_dir();
  const std::string cfg = " --config " + tiny_config().string();

  const auto train = run_cli("train --dataset " + (dir / "ds_a").string() + " --stage all" + cfg +
                             " --seed 5 --out " + (dir / "run").string());
  REQUIRE(train.exit_code == 0);
  CHECK(fs::exists(dir / "run" / "pyramid.json"));
  CHECK(fs::exists(dir / "run" / "logs" / "ae_0.log"));
  CHECK(fs::exists(dir / "run" / "logs" / "gan_2.log"));

  // synthesize: count*(K+1) files, deterministic under the seed
  const auto synth1 = run_cli("synthesize --pyramid " + (dir / "run" / "pyramid.json").string() +
                              " --count 5 --seed 3 --out " + (dir / "gen_a").string());
  REQUIRE(synth1.exit_code == 0);
  int cloud_files = 0;
  for (const auto& e : fs::directory_iterator(dir / "gen_a"))
    if (e.path().extension() == ".pcld") ++cloud_files;
  CHECK(cloud_files == 15);

  const auto synth2 = run_cli("synthesize --pyramid " + (dir / "run" / "pyramid.json").string() +
                              " --count 5 --seed 3 --out " + (dir / "gen_b").string());
  REQUIRE(synth2.exit_code == 0);
  CHECK(slurp(dir / "gen_a" / "sample_0003_level_2.pcld") ==
        slurp(dir / "gen_b" / "sample_0003_level_2.pcld"));

  // upsample: right sizes, wrong input rejected
  const auto up = run_cli("upsample --pyramid " + (dir / "run" / "pyramid.json").string() +
                          " --input " + (dir / "ds_a" / "shapes" / "shape_0000" / "level_0.pcld").string() +
                          " --seed 3 --out " + (dir / "up").string());
  REQUIRE(up.exit_code == 0);
  CHECK(lslp::load_cloud(dir / "up" / "upsampled_level_1.pcld").size() == 32);
  CHECK(lslp::load_cloud(dir / "up" / "upsampled_level_2.pcld").size() == 64);

  const auto up_bad = run_cli("upsample --pyramid " + (dir / "run" / "pyramid.json").string() +
                              " --input " + (dir / "ds_a" / "shapes" / "shape_0000" / "level_1.pcld").string() +
                              " --seed 3 --out " + (dir / "up_bad").string());
  CHECK(up_bad.exit_code != 0);

  // evaluate a set against itself: COV 1, MMD 0, JSD ~ 0
  const auto eval = run_cli("evaluate --set-a " + (dir / "ds_a" / "shapes").string() + " --set-b " +
                            (dir / "ds_a" / "shapes").string() + " --level 2 --report " +
                            (dir / "report.txt").string());
  REQUIRE(eval.exit_code == 0);

  std::istringstream lines(slurp(dir / "report.txt"));
  std::string line;
  int seen = 0;
  while (std::getline(lines, line)) {
    const auto r = lslp::MetricReport::from_record(line);  // grammar round-trip
    if (r.name == "jsd") CHECK(r.value < 1e-12);
    if (r.name == "cov-cd") CHECK(r.value == 1.0);
    if (r.name == "mmd-cd") CHECK(r.value == 0.0);
    CHECK(lslp::MetricReport::from_record(r.to_record()).value == r.value);
    ++seen;
  }
  CHECK(seen == 3);
}

TEST_CASE("cli: render emits PPM images") {
  const auto dir = work_dir();
  const auto r1 = run_cli("render --cloud " +
                          (dir / "ds_a" / "shapes" / "shape_0000" / "level_2.pcld").string() +
                          " --out " + (dir / "cloud.ppm").string());
  REQUIRE(r1.exit_code == 0);
  CHECK(slurp(dir / "cloud.ppm").substr(0, 2) == "P6");

  const auto r2 = run_cli("render --log " + (dir / "run" / "logs" / "ae_0.log").string() +
                          " --metric ae_train_emd --out " + (dir / "curve.ppm").string());
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(dir / "curve.ppm").substr(0, 2) == "P6");
}

TEST_CASE("cli: unknown metric and missing inputs fail cleanly") {
  const auto dir = work_dir();
  const auto r = run_cli("evaluate --set-a " + (dir / "ds_a" / "shapes").string() + " --set-b " +
                         (dir / "ds_a" / "shapes").string() + " --metrics bogus");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("bogus") != std::string::npos);

  const auto r2 = run_cli("synthesize --pyramid /nonexistent/pyramid.json --count 1 --out " +
                          (dir / "nope").string());
  CHECK(r2.exit_code != 0);
}
