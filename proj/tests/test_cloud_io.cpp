#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "lslp/cloud_io.hpp"
#include "oracles.hpp"

using namespace lslp;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "lslp_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("xyz: canonical text round-trips exactly") {
  Rng rng(5);
  const PointCloud pc = oracle::random_cloud(40, rng);
  const std::string text = to_xyz_string(pc);
  const PointCloud back = from_xyz_string(text);
  REQUIRE(back.size() == pc.size());
  for (int i = 0; i < pc.size(); ++i) CHECK(back[i] == pc[i]);
  // file-level fixpoint: save(load(f)) == f
  CHECK(to_xyz_string(back) == text);
}

TEST_CASE("xyz: malformed input rejected") {
  CHECK_THROWS_AS(from_xyz_string("1 2\n"), FormatError);
  CHECK_THROWS_AS(from_xyz_string("a b c\n"), FormatError);
  CHECK_THROWS_AS(from_xyz_string(""), FormatError);
}

TEST_CASE("pcld: bytes round-trip bitwise") {
  Rng rng(9);
  PointCloud pc = oracle::random_cloud(64, rng);
  // snap to float32 first, as every file-born cloud is
  for (auto& p : pc.points)
    p = Vec3(round_f32(p.x()), round_f32(p.y()), round_f32(p.z()));

  const std::string bytes = to_pcld_bytes(pc);
  const PointCloud back = from_pcld_bytes(bytes);
  REQUIRE(back.size() == pc.size());
  for (int i = 0; i < pc.size(); ++i) CHECK(back[i] == pc[i]);
  CHECK(to_pcld_bytes(back) == bytes);
}

TEST_CASE("pcld: corrupt data rejected") {
  Rng rng(13);
  const std::string good = to_pcld_bytes(oracle::random_cloud(8, rng));
  CHECK_THROWS_AS(from_pcld_bytes(good.substr(0, good.size() - 5)), FormatError);
  CHECK_THROWS_AS(from_pcld_bytes("XXXX" + good.substr(4)), FormatError);
  CHECK_THROWS_AS(from_pcld_bytes(std::string("PCLD\0\0\0\0", 8)), FormatError);
}

TEST_CASE("save/load picks format by extension") {
  Rng rng(17);
  const PointCloud pc = oracle::random_cloud(16, rng);
  const auto dir = temp_dir();

  save_cloud(pc, dir / "a.xyz");
  const PointCloud via_xyz = load_cloud(dir / "a.xyz");
  for (int i = 0; i < pc.size(); ++i) CHECK(via_xyz[i] == pc[i]);

  save_cloud(pc, dir / "a.pcld");
  const PointCloud via_pcld = load_cloud(dir / "a.pcld");
  REQUIRE(via_pcld.size() == pc.size());
  for (int i = 0; i < pc.size(); ++i)
    CHECK((via_pcld[i] - pc[i]).norm() < 1e-6);  // float32 storage

  CHECK_THROWS_AS(load_cloud(dir / "missing.pcld"), IoError);
}
